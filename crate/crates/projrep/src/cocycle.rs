//! Normalized 2-cocycles `f: S × S → U(1)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::group::FiniteGroupTable;

/// Values either as exact 8th roots of unity (`ω^k`, `ω = e^{iπ/4}`) or as floats.
#[derive(Debug, Clone, PartialEq)]
pub enum CocycleValues {
    Roots(Vec<u8>),
    Complex(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cocycle {
    pub group: FiniteGroupTable,
    pub values: CocycleValues,
}

/// `ω^k` for the primitive 8th root `ω`.
pub fn root(k: u8) -> Complex64 {
    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;
    match k % 8 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(H, H),
        2 => Complex64::new(0.0, 1.0),
        3 => Complex64::new(-H, H),
        4 => Complex64::new(-1.0, 0.0),
        5 => Complex64::new(-H, -H),
        6 => Complex64::new(0.0, -1.0),
        _ => Complex64::new(H, -H),
    }
}

/// `|ω^a - ω^b|`, exactly 0 or 2 when `a - b` is 0 or 4.
fn root_distance(a: u8, b: u8) -> f64 {
    match (8 + a % 8 - b % 8) % 8 {
        0 => 0.0,
        4 => 2.0,
        k => 2.0 * (PI * k as f64 / 8.0).sin(),
    }
}

impl Cocycle {
    pub fn trivial(group: FiniteGroupTable) -> Self {
        let m = group.order();
        Cocycle { group, values: CocycleValues::Roots(vec![0; m * m]) }
    }

    pub fn from_roots(group: FiniteGroupTable, exps: Vec<u8>) -> Self {
        assert_eq!(exps.len(), group.order().pow(2));
        Cocycle { group, values: CocycleValues::Roots(exps.into_iter().map(|k| k % 8).collect()) }
    }

    pub fn from_complex(group: FiniteGroupTable, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), group.order().pow(2));
        Cocycle { group, values: CocycleValues::Complex(values) }
    }

    pub fn get(&self, r: usize, s: usize) -> Complex64 {
        let i = r * self.group.order() + s;
        match &self.values {
            CocycleValues::Roots(k) => root(k[i]),
            CocycleValues::Complex(v) => v[i],
        }
    }

    /// Exponent of `f(r, s)` when stored exactly.
    pub fn exponent(&self, r: usize, s: usize) -> Option<u8> {
        match &self.values {
            CocycleValues::Roots(k) => Some(k[r * self.group.order() + s]),
            CocycleValues::Complex(_) => None,
        }
    }

    /// Multiplies one value by `ω^k` (exact) or by `e^{iπk/4}` (float).
    pub fn perturbed(&self, r: usize, s: usize, k: u8) -> Self {
        let i = r * self.group.order() + s;
        let mut out = self.clone();
        match &mut out.values {
            CocycleValues::Roots(v) => v[i] = (v[i] + k) % 8,
            CocycleValues::Complex(v) => v[i] *= root(k),
        }
        out
    }
}

/// Largest violation of `f(1,1) = 1` and of the cocycle identity over all triples.
/// Exact for root-of-unity storage.
pub fn validate_cocycle(c: &Cocycle) -> f64 {
    let g = &c.group;
    let m = g.order();
    let e = g.identity();
    match &c.values {
        CocycleValues::Roots(_) => {
            let f = |r, s| c.exponent(r, s).unwrap();
            let mut worst = root_distance(f(e, e), 0);
            for r in 0..m {
                for s in 0..m {
                    for t in 0..m {
                        let lhs = f(r, s) + f(g.mul(r, s), t);
                        let rhs = f(r, g.mul(s, t)) + f(s, t);
                        worst = worst.max(root_distance(lhs, rhs));
                    }
                }
            }
            worst
        }
        CocycleValues::Complex(_) => {
            let mut worst = (c.get(e, e) - 1.0).norm();
            for r in 0..m {
                for s in 0..m {
                    for t in 0..m {
                        let lhs = c.get(r, s) * c.get(g.mul(r, s), t);
                        let rhs = c.get(r, g.mul(s, t)) * c.get(s, t);
                        worst = worst.max((lhs - rhs).norm());
                    }
                }
            }
            worst
        }
    }
}

pub const A: usize = 1;
pub const B: usize = 2;
pub const C: usize = 3;

/// Gauge exponents `(λ(a), λ(b), λ(c))`, in 8ths of a turn, found by [`search_gauge`].
pub const STANDARD_GAUGE: [u8; 3] = [0, 2, 2];
/// Exponents of `(β1, β2)` found by [`search_beta`] for the standard cocycle.
pub const STANDARD_BETA: [u8; 2] = [0, 0];

/// `g0(u, v) = (-1)^{u2 v1}` on `Z/2 × Z/2`, as 8th-root exponents.
pub fn bilinear_exponents() -> Vec<u8> {
    (0..16).map(|i| {
        let (u, v) = (i / 4, i % 4);
        4 * ((u >> 1) & v & 1) as u8
    }).collect()
}

/// `g(u,v) = g0(u,v) λ(u) λ(v) / λ(uv)` with `λ(1) = 1`.
pub fn gauged(lambda: [u8; 3]) -> Cocycle {
    let group = FiniteGroupTable::klein_four();
    let l = |x: usize| if x == 0 { 0 } else { lambda[x - 1] };
    let g0 = bilinear_exponents();
    let exps = (0..16)
        .map(|i| {
            let (u, v) = (i / 4, i % 4);
            (g0[i] + l(u) + l(v) + 8 - l(group.mul(u, v))) % 8
        })
        .collect();
    Cocycle::from_roots(group, exps)
}

/// `g(a,b) = g(a,c) = g(b,c) = -g(b,a) = 1`.
pub fn meets_standard_constraints(c: &Cocycle) -> bool {
    let e = |r, s| c.exponent(r, s);
    e(A, B) == Some(0) && e(A, C) == Some(0) && e(B, C) == Some(0) && e(B, A) == Some(4)
}

/// First gauge, in lexicographic order over 8th roots, meeting the standard constraints.
pub fn search_gauge() -> Option<[u8; 3]> {
    (0..8u8)
        .flat_map(|a| (0..8u8).flat_map(move |b| (0..8u8).map(move |c| [a, b, c])))
        .find(|&l| meets_standard_constraints(&gauged(l)))
}

/// First `(β1, β2)` over 8th roots with `α1 β1² + α2 β2² = 0`, `α1 = f(a,a)`, `α2 = f(b,b)`.
pub fn search_beta(c: &Cocycle) -> Option<[u8; 2]> {
    let (a1, a2) = (c.get(A, A), c.get(B, B));
    (0..8u8)
        .flat_map(|x| (0..8u8).map(move |y| [x, y]))
        .find(|&[x, y]| (a1 * root(2 * x) + a2 * root(2 * y)).norm() < 1e-12)
}

/// The frozen standard cocycle on `Z/2 × Z/2`.
pub fn build_standard_cocycle() -> Cocycle {
    gauged(STANDARD_GAUGE)
}

pub fn standard_beta() -> (Complex64, Complex64) {
    (root(STANDARD_BETA[0]), root(STANDARD_BETA[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_gauge_matches_search() {
        assert_eq!(search_gauge(), Some(STANDARD_GAUGE));
        let c = build_standard_cocycle();
        assert!(meets_standard_constraints(&c));
        let constraints: Vec<Complex64> = [(A, B), (B, A), (A, C), (B, C)].iter().map(|&(r, s)| c.get(r, s)).collect();
        assert_eq!(constraints, [1.0, -1.0, 1.0, 1.0].map(|x| Complex64::new(x, 0.0)));
    }

    #[test]
    fn frozen_beta_matches_search() {
        let c = build_standard_cocycle();
        assert_eq!(search_beta(&c), Some(STANDARD_BETA));
        assert_eq!((c.get(A, A), c.get(B, B)), (Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn standard_cocycle_is_exact() {
        assert_eq!(validate_cocycle(&build_standard_cocycle()), 0.0);
    }

    #[test]
    fn trivial_cocycles_validate() {
        for g in [FiniteGroupTable::cyclic(3), FiniteGroupTable::klein_four(), FiniteGroupTable::cyclic(6)] {
            assert_eq!(validate_cocycle(&Cocycle::trivial(g)), 0.0);
        }
    }

    #[test]
    fn flipped_sign_deviates_by_two() {
        let c = Cocycle::trivial(FiniteGroupTable::klein_four()).perturbed(1, 2, 4);
        assert_eq!(validate_cocycle(&c), 2.0);
        let f = Cocycle::from_complex(FiniteGroupTable::klein_four(), vec![Complex64::new(1.0, 0.0); 16]).perturbed(1, 2, 4);
        assert!((validate_cocycle(&f) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn every_gauge_preserves_the_cocycle_identity() {
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    assert_eq!(validate_cocycle(&gauged([a, b, c])), 0.0);
                }
            }
        }
    }
}
