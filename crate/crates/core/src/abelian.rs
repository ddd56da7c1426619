//! Formal K-group expressions and concrete finitely generated abelian groups.
//!
//! A [`GroupExpr`] is a formal direct product over four atoms: `K0(F)`,
//! `K1(F)` and their quotients by twice themselves. A [`ConcreteGroup`] is
//! `Z^r + Z/d_1 + ... + Z/d_k` in invariant-factor form (`d_j | d_{j+1}`,
//! every `d_j >= 2`), so two concrete groups are isomorphic iff they compare
//! equal.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("torsion factor {0} is not a valid cyclic order (must be >= 2)")]
    BadFactor(u64),
    #[error("group size overflows 64-bit arithmetic")]
    Overflow,
}

/// Multiplicities over the atoms `{K0F, K1F, K0F/2, K1F/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupExpr {
    #[serde(rename = "free_K0F")]
    pub k0f: u64,
    #[serde(rename = "free_K1F")]
    pub k1f: u64,
    #[serde(rename = "mod2_K0F")]
    pub k0f_mod2: u64,
    #[serde(rename = "mod2_K1F")]
    pub k1f_mod2: u64,
}

impl GroupExpr {
    pub const ZERO: GroupExpr = GroupExpr::new(0, 0, 0, 0);
    pub const K0F: GroupExpr = GroupExpr::new(1, 0, 0, 0);
    pub const K1F: GroupExpr = GroupExpr::new(0, 1, 0, 0);

    pub const fn new(k0f: u64, k1f: u64, k0f_mod2: u64, k1f_mod2: u64) -> Self {
        GroupExpr { k0f, k1f, k0f_mod2, k1f_mod2 }
    }

    /// `a * K0(F) + b * K1(F)`.
    pub const fn free(k0f: u64, k1f: u64) -> Self {
        GroupExpr::new(k0f, k1f, 0, 0)
    }

    pub fn as_tuple(&self) -> (u64, u64, u64, u64) {
        (self.k0f, self.k1f, self.k0f_mod2, self.k1f_mod2)
    }

    pub fn is_zero(&self) -> bool {
        *self == GroupExpr::ZERO
    }

    pub fn has_mod2(&self) -> bool {
        self.k0f_mod2 != 0 || self.k1f_mod2 != 0
    }

    /// Index shift `i -> i + 1`.
    pub fn shift(self) -> Self {
        GroupExpr::new(self.k1f, self.k0f, self.k1f_mod2, self.k0f_mod2)
    }

    /// Shift applied `n` times; only the parity of `n` matters.
    pub fn shift_by(self, n: u64) -> Self {
        if n % 2 == 0 {
            self
        } else {
            self.shift()
        }
    }

    /// `k`-fold direct product.
    pub fn power(self, k: u64) -> Self {
        GroupExpr::new(self.k0f * k, self.k1f * k, self.k0f_mod2 * k, self.k1f_mod2 * k)
    }

    pub fn checked_power(self, k: u64) -> Option<Self> {
        Some(GroupExpr::new(
            self.k0f.checked_mul(k)?,
            self.k1f.checked_mul(k)?,
            self.k0f_mod2.checked_mul(k)?,
            self.k1f_mod2.checked_mul(k)?,
        ))
    }

    pub fn checked_add(self, other: Self) -> Option<Self> {
        Some(GroupExpr::new(
            self.k0f.checked_add(other.k0f)?,
            self.k1f.checked_add(other.k1f)?,
            self.k0f_mod2.checked_add(other.k0f_mod2)?,
            self.k1f_mod2.checked_add(other.k1f_mod2)?,
        ))
    }
}

impl Add for GroupExpr {
    type Output = GroupExpr;

    fn add(self, rhs: GroupExpr) -> GroupExpr {
        GroupExpr::new(
            self.k0f + rhs.k0f,
            self.k1f + rhs.k1f,
            self.k0f_mod2 + rhs.k0f_mod2,
            self.k1f_mod2 + rhs.k1f_mod2,
        )
    }
}

impl std::iter::Sum for GroupExpr {
    fn sum<I: Iterator<Item = GroupExpr>>(iter: I) -> GroupExpr {
        iter.fold(GroupExpr::ZERO, Add::add)
    }
}

impl fmt::Display for GroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = [
            (self.k0f, "K0F"),
            (self.k1f, "K1F"),
            (self.k0f_mod2, "K0F/2"),
            (self.k1f_mod2, "K1F/2"),
        ];
        let mut parts = terms.iter().filter(|(m, _)| *m != 0).map(|(m, atom)| {
            if *m == 1 {
                atom.to_string()
            } else {
                format!("{m}*{atom}")
            }
        });
        match parts.next() {
            None => f.write_str("0"),
            Some(first) => {
                f.write_str(&first)?;
                for p in parts {
                    write!(f, " + {p}")?;
                }
                Ok(())
            }
        }
    }
}

/// Hypotheses that some rules need from the coefficient algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Assumption {
    #[serde(rename = "no_2_torsion_K0F")]
    No2TorsionK0F,
    #[serde(rename = "no_2_torsion_K1F")]
    No2TorsionK1F,
    #[serde(rename = "connected_input")]
    ConnectedInput,
}

impl Assumption {
    pub const ALL: [Assumption; 3] =
        [Assumption::No2TorsionK0F, Assumption::No2TorsionK1F, Assumption::ConnectedInput];

    pub fn tag(&self) -> &'static str {
        match self {
            Assumption::No2TorsionK0F => "no_2_torsion_K0F",
            Assumption::No2TorsionK1F => "no_2_torsion_K1F",
            Assumption::ConnectedInput => "connected_input",
        }
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The pair `(K0, K1)` of a function algebra, with the hypotheses it relies on.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KPair {
    pub k0: GroupExpr,
    pub k1: GroupExpr,
    pub assumptions: std::collections::BTreeSet<Assumption>,
}

impl KPair {
    pub fn new(k0: GroupExpr, k1: GroupExpr) -> Self {
        KPair { k0, k1, assumptions: Default::default() }
    }

    /// The pair determined by `K_i = g` for the even index, i.e. `k0 = g`, `k1 = shift(g)`.
    pub fn from_indexed(g: GroupExpr) -> Self {
        KPair::new(g, g.shift())
    }

    pub fn with_assumption(mut self, a: Assumption) -> Self {
        self.assumptions.insert(a);
        self
    }

    /// Componentwise direct product; assumptions are unioned.
    pub fn product(&self, other: &KPair) -> KPair {
        let mut assumptions = self.assumptions.clone();
        assumptions.extend(other.assumptions.iter().copied());
        KPair { k0: self.k0 + other.k0, k1: self.k1 + other.k1, assumptions }
    }

    pub fn same_groups(&self, other: &KPair) -> bool {
        self.k0 == other.k0 && self.k1 == other.k1
    }
}

/// `Z^rank + Z/d_1 + ... + Z/d_k` with `d_j | d_{j+1}` and `d_j >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ConcreteGroup {
    rank: u64,
    factors: Vec<u64>,
}

impl ConcreteGroup {
    pub fn trivial() -> Self {
        ConcreteGroup::default()
    }

    pub fn free(rank: u64) -> Self {
        ConcreteGroup { rank, factors: Vec::new() }
    }

    pub fn cyclic(d: u64) -> Result<Self, AbelianError> {
        ConcreteGroup::new(0, &[d])
    }

    /// Builds the group from a free rank and an arbitrary list of cyclic orders.
    pub fn new(rank: u64, torsion: &[u64]) -> Result<Self, AbelianError> {
        Ok(ConcreteGroup { rank, factors: normalize(torsion)? })
    }

    pub fn rank(&self) -> u64 {
        self.rank
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.factors.is_empty()
    }

    /// True iff the group has no element of order 2.
    pub fn has_no_2_torsion(&self) -> bool {
        self.factors.iter().all(|d| d % 2 == 1)
    }

    pub fn product(&self, other: &ConcreteGroup) -> Result<ConcreteGroup, AbelianError> {
        let rank = self.rank.checked_add(other.rank).ok_or(AbelianError::Overflow)?;
        let mut torsion = self.factors.clone();
        torsion.extend_from_slice(&other.factors);
        ConcreteGroup::new(rank, &torsion)
    }

    /// `G / 2G`.
    pub fn mod2(&self) -> ConcreteGroup {
        let evens = self.factors.iter().filter(|d| *d % 2 == 0).count() as u64;
        let count = self.rank + evens;
        ConcreteGroup { rank: 0, factors: vec![2; count as usize] }
    }

    /// `k`-fold direct product.
    pub fn power(&self, k: u64) -> Result<ConcreteGroup, AbelianError> {
        let rank = self.rank.checked_mul(k).ok_or(AbelianError::Overflow)?;
        let len = (self.factors.len() as u64).checked_mul(k).ok_or(AbelianError::Overflow)?;
        if len > MAX_FACTORS {
            return Err(AbelianError::Overflow);
        }
        let mut torsion = Vec::with_capacity(len as usize);
        for _ in 0..k {
            torsion.extend_from_slice(&self.factors);
        }
        ConcreteGroup::new(rank, &torsion)
    }
}

// Bound on the number of invariant factors materialized by `power`.
const MAX_FACTORS: u64 = 1 << 20;

impl fmt::Display for ConcreteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.factors.iter().map(|d| format!("Z/{d}")));
        f.write_str(&parts.join(" + "))
    }
}

fn prime_powers(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Invariant-factor form of `Z/t_1 + ... + Z/t_k`.
///
/// Splits every order into prime powers, then rebuilds the chain by
/// multiplying together the j-th largest power of every prime.
pub fn normalize(torsion: &[u64]) -> Result<Vec<u64>, AbelianError> {
    let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &d in torsion {
        if d < 2 {
            return Err(AbelianError::BadFactor(d));
        }
        for (p, e) in prime_powers(d) {
            by_prime.entry(p).or_default().push(e);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut chain = vec![1u64; len];
    for (p, mut exps) in by_prime {
        exps.sort_unstable_by(|a, b| b.cmp(a));
        // largest exponents go to the last (largest) invariant factors
        for (j, e) in exps.into_iter().enumerate() {
            let slot = len - 1 - j;
            let pe = p.checked_pow(e).ok_or(AbelianError::Overflow)?;
            chain[slot] = chain[slot].checked_mul(pe).ok_or(AbelianError::Overflow)?;
        }
    }
    Ok(chain)
}

/// Substitutes `K0(F) -> g0`, `K1(F) -> g1` into a formal expression.
pub fn instantiate(
    x: &GroupExpr,
    g0: &ConcreteGroup,
    g1: &ConcreteGroup,
) -> Result<ConcreteGroup, AbelianError> {
    let parts = [
        g0.power(x.k0f)?,
        g1.power(x.k1f)?,
        g0.mod2().power(x.k0f_mod2)?,
        g1.mod2().power(x.k1f_mod2)?,
    ];
    parts.iter().try_fold(ConcreteGroup::trivial(), |acc, g| acc.product(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cg(rank: u64, torsion: &[u64]) -> ConcreteGroup {
        ConcreteGroup::new(rank, torsion).unwrap()
    }

    /// Multiset of element orders of a finite abelian group given by cyclic orders.
    fn element_orders(torsion: &[u64]) -> Vec<u64> {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 { a } else { gcd(b, a % b) }
        }
        let mut orders = vec![1u64];
        for &d in torsion {
            let mut next = Vec::new();
            for &o in &orders {
                for x in 0..d {
                    let ox = d / gcd(x, d);
                    next.push(o / gcd(o, ox) * ox);
                }
            }
            orders = next;
        }
        orders.sort_unstable();
        orders
    }

    #[test]
    fn ge_add_examples() {
        assert_eq!(GroupExpr::new(1, 0, 0, 0) + GroupExpr::new(0, 2, 0, 0), GroupExpr::new(1, 2, 0, 0));
        let x = GroupExpr::new(3, 1, 4, 1);
        assert_eq!(GroupExpr::ZERO + x, x);
        assert_eq!(GroupExpr::new(1, 1, 1, 0) + GroupExpr::new(2, 0, 0, 1), GroupExpr::new(3, 1, 1, 1));
    }

    #[test]
    fn ge_shift_examples() {
        assert_eq!(GroupExpr::new(1, 0, 0, 0).shift(), GroupExpr::new(0, 1, 0, 0));
        assert_eq!(GroupExpr::new(2, 3, 1, 0).shift(), GroupExpr::new(3, 2, 0, 1));
        let x = GroupExpr::new(5, 7, 1, 2);
        assert_eq!(x.shift().shift(), x);
        assert_eq!(x.shift_by(3), x.shift());
    }

    #[test]
    fn ge_power_examples() {
        assert_eq!(GroupExpr::new(1, 1, 0, 0).power(3), GroupExpr::new(3, 3, 0, 0));
        let x = GroupExpr::new(2, 1, 1, 3);
        assert_eq!(x.power(0), GroupExpr::ZERO);
        assert_eq!(x.power(1), x);
    }

    #[test]
    fn normalize_examples_match_element_order_oracle() {
        assert_eq!(normalize(&[2, 3]).unwrap(), vec![6]);
        assert_eq!(element_orders(&[2, 3]), element_orders(&[6]));
        assert_eq!(normalize(&[2, 2]).unwrap(), vec![2, 2]);
        assert_eq!(normalize(&[4, 6]).unwrap(), vec![2, 12]);
        assert_eq!(element_orders(&[4, 6]), element_orders(&[2, 12]));
        assert!(normalize(&[]).unwrap().is_empty());
    }

    #[test]
    fn normalize_rejects_small_entries() {
        assert_eq!(normalize(&[3, 1]), Err(AbelianError::BadFactor(1)));
        assert_eq!(normalize(&[0]), Err(AbelianError::BadFactor(0)));
    }

    #[test]
    fn normalize_agrees_with_oracle_on_small_lists() {
        let lists: &[&[u64]] = &[&[2, 4, 8], &[6, 10, 15], &[9, 3, 2], &[12, 18], &[5, 7, 35], &[4, 4, 2, 3]];
        for l in lists {
            let chain = normalize(l).unwrap();
            assert!(chain.windows(2).all(|w| w[1] % w[0] == 0), "{chain:?}");
            assert_eq!(element_orders(l), element_orders(&chain), "{l:?}");
        }
    }

    #[test]
    fn product_examples() {
        assert_eq!(cg(1, &[]).product(&ConcreteGroup::trivial()).unwrap(), cg(1, &[]));
        assert_eq!(cg(0, &[2]).product(&cg(0, &[3])).unwrap(), cg(0, &[6]));
        assert_eq!(cg(2, &[2]).product(&cg(1, &[2])).unwrap(), cg(3, &[2, 2]));
    }

    #[test]
    fn mod2_examples() {
        assert_eq!(cg(1, &[]).mod2(), cg(0, &[2]));
        assert_eq!(cg(0, &[3]).mod2(), ConcreteGroup::trivial());
        // brute force: (Z^2 + Z/4) / 2 = (Z/2)^2 + Z/4 / 2Z/4 = (Z/2)^3
        assert_eq!(cg(2, &[4]).mod2(), cg(0, &[2, 2, 2]));
    }

    #[test]
    fn instantiate_examples() {
        let z = ConcreteGroup::free(1);
        let zero = ConcreteGroup::trivial();
        let x = GroupExpr::new(1, 0, 1, 0);
        assert_eq!(instantiate(&x, &z, &zero).unwrap(), cg(1, &[2]));
        assert_eq!(instantiate(&GroupExpr::ZERO, &z, &z).unwrap(), zero);
        let g0 = cg(1, &[3]);
        let oracle = g0.product(&g0.mod2()).unwrap();
        assert_eq!(instantiate(&x, &g0, &zero).unwrap(), oracle);
        assert_eq!(oracle, cg(1, &[6]));
    }

    #[test]
    fn display_uses_group_notation() {
        assert_eq!(ConcreteGroup::trivial().to_string(), "0");
        assert_eq!(cg(1, &[]).to_string(), "Z");
        assert_eq!(cg(2, &[2, 4]).to_string(), "Z^2 + Z/2 + Z/4");
        assert_eq!(GroupExpr::new(2, 0, 1, 0).to_string(), "2*K0F + K0F/2");
        assert_eq!(GroupExpr::ZERO.to_string(), "0");
    }

    #[test]
    fn two_torsion_detection() {
        assert!(cg(3, &[3, 15]).has_no_2_torsion());
        assert!(!cg(0, &[4]).has_no_2_torsion());
    }
}
