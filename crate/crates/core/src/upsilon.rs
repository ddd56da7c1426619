//! `(p, q)` descriptors: an algebra `G` with `K_i(F ⊗ G) ≅ K_i(F)^p × K_{i+1}(F)^q`.
//!
//! Only the exponents are carried. The natural isomorphisms behind them have
//! no finite data content here.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{GroupExpr, KPair};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UpsilonError {
    /// The half-sum in the tensor formula was odd or negative. Cannot happen
    /// for well-formed inputs; reported rather than silently rounded.
    #[error("tensor half-sum is not a natural number (sum {sum}, difference {diff})")]
    NonIntegral { sum: i128, diff: i128 },
    #[error("descriptor arithmetic overflowed")]
    Overflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct UpsilonDesc {
    pub p: u64,
    pub q: u64,
}

impl UpsilonDesc {
    pub const NULL: UpsilonDesc = UpsilonDesc { p: 0, q: 0 };
    /// The tensor unit (the coefficient algebra itself).
    pub const UNIT: UpsilonDesc = UpsilonDesc { p: 1, q: 0 };

    pub const fn new(p: u64, q: u64) -> Self {
        UpsilonDesc { p, q }
    }

    /// `K_i = K_i(F)^p × K_{i+1}(F)^q` as a formal group at even index.
    pub fn indexed(&self) -> GroupExpr {
        GroupExpr::free(self.p, self.q)
    }

    /// `p - q`; additive under products and multiplicative under tensors.
    pub fn euler(&self) -> i128 {
        self.p as i128 - self.q as i128
    }
}

/// Product of algebras: exponents add.
pub fn product(descs: &[UpsilonDesc]) -> UpsilonDesc {
    descs.iter().fold(UpsilonDesc::NULL, |acc, d| UpsilonDesc::new(acc.p + d.p, acc.q + d.q))
}

/// Tensor product: `p = (Π(p_j+q_j) + Π(p_j-q_j)) / 2`, `q = (Π(p_j+q_j) - Π(p_j-q_j)) / 2`.
pub fn tensor(descs: &[UpsilonDesc]) -> Result<UpsilonDesc, UpsilonError> {
    let mut sum: i128 = 1;
    let mut diff: i128 = 1;
    for d in descs {
        let s = d.p as i128 + d.q as i128;
        sum = sum.checked_mul(s).ok_or(UpsilonError::Overflow)?;
        diff = diff.checked_mul(d.euler()).ok_or(UpsilonError::Overflow)?;
    }
    let twice_p = sum.checked_add(diff).ok_or(UpsilonError::Overflow)?;
    let twice_q = sum.checked_sub(diff).ok_or(UpsilonError::Overflow)?;
    if twice_p % 2 != 0 || twice_q % 2 != 0 || twice_p < 0 || twice_q < 0 {
        return Err(UpsilonError::NonIntegral { sum, diff });
    }
    let p = u64::try_from(twice_p / 2).map_err(|_| UpsilonError::Overflow)?;
    let q = u64::try_from(twice_q / 2).map_err(|_| UpsilonError::Overflow)?;
    Ok(UpsilonDesc::new(p, q))
}

/// Unitization adds one copy of the coefficient algebra.
pub fn unitize(d: UpsilonDesc) -> UpsilonDesc {
    UpsilonDesc::new(d.p + 1, d.q)
}

/// Quotient `G1 / G3` of an exact sequence whose middle term is K-trivial.
pub fn quotient(d1: UpsilonDesc, d3: UpsilonDesc) -> UpsilonDesc {
    UpsilonDesc::new(d1.p + d3.q, d1.q + d3.p)
}

pub fn to_kpair(d: UpsilonDesc) -> KPair {
    KPair::from_indexed(d.indexed())
}
