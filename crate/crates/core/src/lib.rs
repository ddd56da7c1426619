//! Formal K-theory of function algebras over a coefficient algebra.

pub mod abelian;
pub mod consistency;
pub mod dsl;
pub mod rules;
pub mod sixterm;
pub mod spaces;
pub mod upsilon;
