//! Finite-level operator laboratory for projective representations of `Z/2 × Z/2`.

pub mod battery;
pub mod cocycle;
pub mod group;
pub mod lab;
pub mod sample;

pub use battery::{run_battery, BatteryReport, CheckOutcome};
pub use lab::{Lab, Op, ProjrepError};
