//! Operators on `ℓ²(Sⁿ)` for `S = Z/2 × Z/2` and the identities built from them.
//!
//! Level `n` operators are `4ⁿ × 4ⁿ` matrices. The first tensor factor is the
//! most significant index, so a level `n-1` operator `X` sits at level `n` as
//! `X ⊗ I₄`. Residuals are Frobenius norms, which bound the operator norm from
//! above; norm-preservation checks use the operator norm itself.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::cocycle::{self, Cocycle};

pub type Op = DMatrix<Complex64>;

/// Precondition residual above which inputs are rejected.
pub const INPUT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjrepError {
    #[error("operator has side {found}, expected {expected} for level {level}")]
    LevelMismatch { level: u32, expected: usize, found: usize },
    #[error("α1·β1² + α2·β2² = 0 fails with residual {0:e}")]
    BetaConstraint(f64),
    #[error("the witness needs the Klein four-group, got a group of order {0}")]
    WrongGroup(usize),
    #[error("input is not a projection (residual {0:e})")]
    NotProjection(f64),
    #[error("input is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("X*X = P, XX* = Q fails with residual {0:e}")]
    NotPartialIsometry(f64),
    #[error("polynomial is not invertible at z = {0}")]
    Singular(Complex64),
    #[error("need at most {max} coefficients for m = {m}, got {got}")]
    TooManyCoefficients { m: u32, max: usize, got: usize },
}

pub fn side(level: u32) -> usize {
    4usize.pow(level)
}

pub fn identity(level: u32) -> Op {
    Op::identity(side(level), side(level))
}

pub fn zeros(level: u32) -> Op {
    Op::zeros(side(level), side(level))
}

/// `x ⊗ I` raising `x` by `up` levels.
pub fn lift(x: &Op, up: u32) -> Op {
    if up == 0 {
        x.clone()
    } else {
        x.kronecker(&Op::identity(side(up), side(up)))
    }
}

/// `I ⊗ x ⊗ I` with the single-level operator `x` at factor `i` (1-based) of `total`.
pub fn place(x: &Op, i: u32, total: u32) -> Op {
    debug_assert!(1 <= i && i <= total && x.nrows() == 4);
    let left = Op::identity(side(i - 1), side(i - 1));
    lift(&left.kronecker(x), total - i)
}

pub fn level_of(x: &Op) -> Option<u32> {
    if x.nrows() != x.ncols() {
        return None;
    }
    (0..=8).find(|&l| side(l) == x.nrows())
}

fn expect_level(x: &Op, level: u32) -> Result<(), ProjrepError> {
    if x.nrows() == side(level) && x.ncols() == side(level) {
        Ok(())
    } else {
        Err(ProjrepError::LevelMismatch { level, expected: side(level), found: x.nrows() })
    }
}

pub fn residual(x: &Op, y: &Op) -> f64 {
    (x - y).norm()
}

pub fn op_norm(x: &Op) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.singular_values().max()
}

pub fn min_singular_value(x: &Op) -> f64 {
    x.singular_values().min()
}

/// `max(‖P² - P‖, ‖P* - P‖)`.
pub fn projection_residual(p: &Op) -> f64 {
    residual(&(p * p), p).max(residual(&p.adjoint(), p))
}

/// `max(‖U*U - I‖, ‖UU* - I‖)`.
pub fn unitary_residual(u: &Op) -> f64 {
    let i = Op::identity(u.nrows(), u.ncols());
    residual(&(u.adjoint() * u), &i).max(residual(&(u * u.adjoint()), &i))
}

/// `(column, value)` per row when every row has exactly one nonzero entry.
pub fn monomial_form(x: &Op) -> Option<Vec<(usize, Complex64)>> {
    (0..x.nrows())
        .map(|i| {
            let mut nz = (0..x.ncols()).filter(|&j| x[(i, j)] != Complex64::new(0.0, 0.0));
            let j = nz.next()?;
            nz.next().is_none().then(|| (j, x[(i, j)]))
        })
        .collect()
}

/// Twisted translation `V_t` for `t ∈ Sⁿ`, `n = t.len()`: the Kronecker product of
/// the level-1 operators `(V_t)_{s,u} = f(t, t⁻¹s)·[u = t⁻¹s]`.
pub fn build_v(c: &Cocycle, t: &[usize]) -> Op {
    let g = &c.group;
    let m = g.order();
    let single = |t: usize| {
        let mut v = Op::zeros(m, m);
        for s in 0..m {
            let u = g.mul(g.inv(t), s);
            v[(s, u)] = c.get(t, u);
        }
        v
    };
    t.iter().fold(Op::identity(1, 1), |acc, &x| acc.kronecker(&single(x)))
}

/// `(C, A, B)` with `A = C*C`, `B = CC*`, acting on the last tensor factor of level `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomWitness {
    pub level: u32,
    pub c: Op,
    pub a: Op,
    pub b: Op,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomResiduals {
    pub a_projection: f64,
    pub b_projection: f64,
    pub sum_is_identity: f64,
    pub orthogonal: f64,
    pub c_square_zero: f64,
    /// Largest `‖[C, V_t ⊗ I]‖` over `t ∈ S^{n-1}`.
    pub commutes_with_lower: f64,
}

impl AxiomResiduals {
    pub fn max(&self) -> f64 {
        [
            self.a_projection,
            self.b_projection,
            self.sum_is_identity,
            self.orthogonal,
            self.c_square_zero,
            self.commutes_with_lower,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// The lab for a fixed cocycle on `Z/2 × Z/2` and a pair `(β1, β2)`.
#[derive(Debug, Clone)]
pub struct Lab {
    pub cocycle: Cocycle,
    pub beta: (Complex64, Complex64),
    c1: Op,
}

impl Lab {
    /// Rejects `(β1, β2)` unless `f(a,a)β1² + f(b,b)β2² = 0`.
    pub fn new(cocycle: Cocycle, beta1: Complex64, beta2: Complex64) -> Result<Self, ProjrepError> {
        if cocycle.group.order() != 4 {
            return Err(ProjrepError::WrongGroup(cocycle.group.order()));
        }
        let (a, b) = (cocycle::A, cocycle::B);
        let r = (cocycle.get(a, a) * beta1 * beta1 + cocycle.get(b, b) * beta2 * beta2).norm();
        if r > 1e-12 {
            return Err(ProjrepError::BetaConstraint(r));
        }
        let c1 = (build_v(&cocycle, &[a]) * beta1 + build_v(&cocycle, &[b]) * beta2) * Complex64::new(0.5, 0.0);
        Ok(Lab { cocycle, beta: (beta1, beta2), c1 })
    }

    pub fn standard() -> Self {
        let (b1, b2) = cocycle::standard_beta();
        Lab::new(cocycle::build_standard_cocycle(), b1, b2).expect("frozen constants satisfy the constraint")
    }

    pub fn v(&self, t: &[usize]) -> Op {
        build_v(&self.cocycle, t)
    }

    /// Every `t ∈ Sⁿ` in lexicographic order.
    pub fn elements(level: u32) -> Vec<Vec<usize>> {
        (0..side(level))
            .map(|code| (0..level).rev().map(|j| (code >> (2 * j)) & 3).collect())
            .collect()
    }

    /// Single-factor `c`, `a = c*c`, `b = cc*`.
    pub fn c1(&self) -> &Op {
        &self.c1
    }

    pub fn witness(&self, level: u32) -> AxiomWitness {
        assert!(level >= 1, "witnesses start at level 1");
        let c = place(&self.c1, level, level);
        let a = c.adjoint() * &c;
        let b = &c * c.adjoint();
        AxiomWitness { level, c, a, b }
    }

    pub fn axiom_residuals(&self, w: &AxiomWitness) -> AxiomResiduals {
        let i = identity(w.level);
        let commutes_with_lower = Lab::elements(w.level - 1)
            .iter()
            .map(|t| {
                let v = lift(&self.v(t), 1);
                residual(&(&w.c * &v), &(&v * &w.c))
            })
            .fold(0.0, f64::max);
        AxiomResiduals {
            a_projection: projection_residual(&w.a),
            b_projection: projection_residual(&w.b),
            sum_is_identity: residual(&(&w.a + &w.b), &i),
            orthogonal: (&w.a * &w.b).norm(),
            c_square_zero: (&w.c * &w.c).norm(),
            commutes_with_lower,
        }
    }
}

impl AxiomWitness {
    fn lower(&self, x: &Op) -> Result<Op, ProjrepError> {
        expect_level(x, self.level - 1)?;
        Ok(lift(x, 1))
    }

    /// `ρ(X) = A·(X ⊗ I)`.
    pub fn rho(&self, x: &Op) -> Result<Op, ProjrepError> {
        Ok(&self.a * self.lower(x)?)
    }

    /// Largest disagreement among `AX`, `XA`, `AXA`, `C*XC`.
    pub fn rho_agreement(&self, x: &Op) -> Result<f64, ProjrepError> {
        let x = self.lower(x)?;
        let ax = &self.a * &x;
        let forms = [&x * &self.a, &ax * &self.a, self.c.adjoint() * &x * &self.c];
        Ok(forms.iter().map(|f| residual(&ax, f)).fold(0.0, f64::max))
    }

    /// `τ(U) = A·(U ⊗ I) + B`.
    pub fn tau(&self, u: &Op) -> Result<Op, ProjrepError> {
        let r = unitary_residual(u);
        if r > INPUT_TOL {
            return Err(ProjrepError::NotUnitary(r));
        }
        Ok(&self.a * self.lower(u)? + &self.b)
    }

    /// `X = C·(P ⊗ I)` with residuals of `X*X = AP` and `XX* = BP`.
    pub fn mvn_914(&self, p: &Op) -> Result<(Op, [f64; 2]), ProjrepError> {
        let r = projection_residual(p);
        if r > INPUT_TOL {
            return Err(ProjrepError::NotProjection(r));
        }
        let p = self.lower(p)?;
        let x = &self.c * &p;
        let res = [residual(&(x.adjoint() * &x), &(&self.a * &p)), residual(&(&x * x.adjoint()), &(&self.b * &p))];
        Ok((x, res))
    }

    /// Residual of `(C+C*)(AX + BY)(C+C*) = BX + AY`, of `(C+C*)² = I`, and of `C+C*` self-adjoint.
    pub fn symmetry_931(&self, x: &Op, y: &Op) -> Result<[f64; 3], ProjrepError> {
        let (x, y) = (self.lower(x)?, self.lower(y)?);
        let s = &self.c + self.c.adjoint();
        let lhs = &s * (&self.a * &x + &self.b * &y) * &s;
        let rhs = &self.b * &x + &self.a * &y;
        Ok([residual(&lhs, &rhs), residual(&(&s * &s), &identity(self.level)), residual(&s.adjoint(), &s)])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conjugation930 {
    pub v: Op,
    pub u: Op,
    pub v_unitary: f64,
    pub u_unitary: f64,
    pub conjugation: f64,
}

impl Conjugation930 {
    pub fn max_residual(&self) -> f64 {
        self.v_unitary.max(self.u_unitary).max(self.conjugation)
    }
}

/// From `X*X = P`, `XX* = Q` at level `n`, with witnesses at `n+1` and `n+2`:
/// `V = A₁X + C₁(1-P) + C₁*(1-Q) + B₁X*`, `U = A₂V + B₂V*`, and the residual of
/// `U(A₂A₁P)U* = A₂A₁Q`.
pub fn mvn_conjugation_930(
    w1: &AxiomWitness,
    w2: &AxiomWitness,
    p: &Op,
    q: &Op,
    x: &Op,
) -> Result<Conjugation930, ProjrepError> {
    assert_eq!(w2.level, w1.level + 1, "witnesses must be consecutive");
    let n = w1.level - 1;
    for m in [p, q, x] {
        expect_level(m, n)?;
    }
    let pre = residual(&(x.adjoint() * x), p).max(residual(&(x * x.adjoint()), q));
    if pre > INPUT_TOL {
        return Err(ProjrepError::NotPartialIsometry(pre));
    }
    let one = identity(n);
    let (xu, xs) = (lift(x, 1), lift(&x.adjoint(), 1));
    let (np, nq) = (lift(&(&one - p), 1), lift(&(&one - q), 1));
    let v = &w1.a * xu + &w1.c * np + w1.c.adjoint() * nq + &w1.b * xs;
    let u = &w2.a * lift(&v, 1) + &w2.b * lift(&v.adjoint(), 1);
    let a21 = &w2.a * lift(&w1.a, 1);
    let lhs = &u * (&a21 * lift(p, 2)) * u.adjoint();
    let rhs = &a21 * lift(q, 2);
    Ok(Conjugation930 {
        v_unitary: unitary_residual(&v),
        u_unitary: unitary_residual(&u),
        conjugation: residual(&lhs, &rhs),
        v,
        u,
    })
}

/// `z P + (1 - P)`.
pub fn bott_loop(p: &Op, z: Complex64) -> Result<Op, ProjrepError> {
    let r = projection_residual(p);
    if r > INPUT_TOL {
        return Err(ProjrepError::NotProjection(r));
    }
    let one = Op::identity(p.nrows(), p.ncols());
    Ok(p * z + (one - p))
}

/// `k` equally spaced points on the unit circle, starting at 1.
pub fn circle_samples(k: usize) -> Vec<Complex64> {
    (0..k).map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / k as f64)).collect()
}

/// The factors `A, B, C, C*` used by the digit-indexed products.
#[derive(Debug, Clone)]
pub struct DigitOperators {
    pub n: u32,
    pub m: u32,
    a: Vec<Op>,
    b: Vec<Op>,
    c: Vec<Op>,
    cs: Vec<Op>,
}

impl DigitOperators {
    /// Operators at level `n + m` for factors `n+1..=n+m`.
    pub fn new(lab: &Lab, n: u32, m: u32) -> Self {
        let total = n + m;
        let c1 = lab.c1();
        let (a1, b1) = (c1.adjoint() * c1, c1 * c1.adjoint());
        let at = |x: &Op| (1..=m).map(|i| place(x, n + i, total)).collect::<Vec<_>>();
        DigitOperators { n, m, a: at(&a1), b: at(&b1), c: at(c1), cs: at(&c1.adjoint()) }
    }

    pub fn l(&self) -> usize {
        (1usize << self.m) - 1
    }

    pub fn level(&self) -> u32 {
        self.n + self.m
    }

    /// `(p, q)_i`: `A`, `C*`, `C`, `B` for digit pairs `00`, `01`, `10`, `11`.
    pub fn pq(&self, p: usize, q: usize, i: u32) -> &Op {
        let j = (i - 1) as usize;
        match ((p >> j) & 1, (q >> j) & 1) {
            (0, 0) => &self.a[j],
            (0, _) => &self.cs[j],
            (_, 0) => &self.c[j],
            _ => &self.b[j],
        }
    }

    /// `∏_{i=1}^{m} (p, q)_i`.
    pub fn pq_product(&self, p: usize, q: usize) -> Op {
        (1..=self.m).fold(identity(self.level()), |acc, i| acc * self.pq(p, q, i))
    }

    pub fn a_product(&self) -> Op {
        self.pq_product(0, 0)
    }

    /// `X = Σ_{p≥1} a_p Σ_{q≥p} ∏(q, q-p)_i` for level-`n` coefficients `a_1..a_l`.
    pub fn nilpotent(&self, a: &[Op]) -> Op {
        let mut x = zeros(self.level());
        for (p, ap) in (1..).zip(a) {
            let ap = lift(ap, self.m);
            for q in p..=self.l() {
                x += &ap * self.pq_product(q, q - p);
            }
        }
        x
    }
}

/// `μX(z) = constant + z·linear` for `X(z) = Σ a_p z^p`.
#[derive(Debug, Clone)]
pub struct Linearization {
    pub digits: DigitOperators,
    pub coeffs: Vec<Op>,
    pub constant: Op,
    pub linear: Op,
}

fn poly(coeffs: &[Op], z: Complex64) -> Op {
    let mut acc = Op::zeros(coeffs[0].nrows(), coeffs[0].ncols());
    for a in coeffs.iter().rev() {
        acc = acc * z + a;
    }
    acc
}

impl Linearization {
    pub fn eval(&self, z: Complex64) -> Op {
        &self.constant + &self.linear * z
    }

    /// `X(z)` at level `n`.
    pub fn x(&self, z: Complex64) -> Op {
        poly(&self.coeffs, z)
    }

    /// `X_p(z) = Σ_{q≥p} a_q z^{q-p}`.
    pub fn x_tail(&self, p: usize, z: Complex64) -> Op {
        poly(&self.coeffs[p..], z)
    }

    /// `Y₁(z) = 1 - Σ_{p≥1} X_p(z) ∏(0,p)_i`.
    pub fn y1(&self, z: Complex64) -> Op {
        let d = &self.digits;
        let mut y = identity(d.level());
        for p in 1..=d.l() {
            y -= lift(&self.x_tail(p, z), d.m) * d.pq_product(0, p);
        }
        y
    }

    /// `Z₁(z) = 1 + Σ_{q≥1} z^q Σ_{r≥q} ∏(r, r-q)_i`.
    pub fn z1(&self, z: Complex64) -> Op {
        let d = &self.digits;
        let mut out = identity(d.level());
        for q in 1..=d.l() {
            let mut inner = zeros(d.level());
            for r in q..=d.l() {
                inner += d.pq_product(r, r - q);
            }
            out += inner * z.powu(q as u32);
        }
        out
    }

    /// `‖Y₁ μX Z₁ - (1 - ∏A + X(z)∏A)‖`.
    pub fn endpoint_residual(&self, z: Complex64) -> f64 {
        let d = &self.digits;
        let pa = d.a_product();
        let rhs = identity(d.level()) - &pa + lift(&self.x(z), d.m) * &pa;
        residual(&(self.y1(z) * self.eval(z) * self.z1(z)), &rhs)
    }
}

/// Linearizes `Σ_{p=0}^{l} a_p z^p` (level `n`, `l = 2^m - 1`; missing
/// coefficients are zero). Rejects polynomials singular at a circle sample.
pub fn higman_linearize(lab: &Lab, n: u32, m: u32, coeffs: &[Op], samples: &[Complex64]) -> Result<Linearization, ProjrepError> {
    let digits = DigitOperators::new(lab, n, m);
    let l = digits.l();
    if coeffs.len() > l + 1 {
        return Err(ProjrepError::TooManyCoefficients { m, max: l + 1, got: coeffs.len() });
    }
    for a in coeffs {
        expect_level(a, n)?;
    }
    let mut coeffs = coeffs.to_vec();
    coeffs.resize(l + 1, zeros(n));
    for &z in samples {
        if min_singular_value(&poly(&coeffs, z)) < INPUT_TOL {
            return Err(ProjrepError::Singular(z));
        }
    }
    let mut constant = identity(digits.level()) - digits.a_product();
    for (p, a) in coeffs.iter().enumerate() {
        constant += lift(a, m) * digits.pq_product(0, p);
    }
    let mut linear = zeros(digits.level());
    for p in 1..=l {
        linear -= digits.pq_product(p, p - 1);
    }
    Ok(Linearization { digits, coeffs, constant, linear })
}
