//! The full identity battery, one entry per check id.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cocycle::{self, validate_cocycle, A, B, C};
use crate::lab::{
    bott_loop, circle_samples, higman_linearize, identity, min_singular_value, monomial_form, mvn_conjugation_930, op_norm,
    residual, unitary_residual, zeros, DigitOperators, Lab, Op,
};
use crate::sample::Sampler;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const MAX_LEVEL: u32 = 4;
/// Random instances per identity and level.
pub const INSTANCES: usize = 20;
pub const CIRCLE_SAMPLES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: String,
    pub citation: String,
    pub level: u32,
    pub seed: u64,
    pub instances: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub levels: u32,
    pub seed: u64,
    pub tolerance: f64,
    pub checks: Vec<CheckOutcome>,
}

impl BatteryReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, id: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Largest residual among checks whose id starts with `prefix`.
    pub fn max_residual(&self, prefix: &str) -> Option<f64> {
        self.checks.iter().filter(|c| c.id.starts_with(prefix)).map(|c| c.max_residual).reduce(f64::max)
    }

    pub fn render_text(&self) -> String {
        let mut s = format!("levels 1..={} seed {} tolerance {:e}\n", self.levels, self.seed, self.tolerance);
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            s.push_str(&format!(
                "{status} {} [{}] level {} instances {} max residual {:.3e}\n",
                c.id, c.citation, c.level, c.instances, c.max_residual
            ));
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        s.push_str(&format!("{passed}/{} checks within tolerance\n", self.checks.len()));
        s
    }
}

struct Runner {
    seed: u64,
    tolerance: f64,
    checks: Vec<CheckOutcome>,
}

impl Runner {
    fn record(&mut self, id: String, citation: &str, level: u32, instances: usize, max_residual: f64) {
        let passed = max_residual.is_finite() && max_residual <= self.tolerance;
        self.checks.push(CheckOutcome {
            id,
            citation: citation.into(),
            level,
            seed: self.seed,
            instances,
            max_residual,
            tolerance: self.tolerance,
            passed,
        });
    }

    fn run<F: FnMut(&mut Sampler) -> f64>(&mut self, id: String, citation: &str, level: u32, instances: usize, mut f: F) {
        let mut s = Sampler::new(self.seed, &id);
        let worst = (0..instances).map(|_| f(&mut s)).fold(0.0, max_nan);
        self.record(id, citation, level, instances, worst);
    }
}

/// `max` that propagates NaN so a broken computation cannot pass.
fn max_nan(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) }
}

fn worst<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    xs.into_iter().fold(0.0, max_nan)
}

type Monomial = Vec<(usize, Complex64)>;

/// Position of `t` in [`Lab::elements`].
fn index_of(t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &x| 4 * acc + x)
}

/// Frobenius distance between `S·T` and `phase·U` for operators in monomial form.
fn monomial_product_residual(s: &Monomial, t: &Monomial, u: &Monomial, phase: Complex64) -> f64 {
    let total: f64 = s
        .iter()
        .zip(u)
        .map(|(&(j, a), &(k, c))| {
            let (col, val) = (t[j].0, a * t[j].1);
            let expected = phase * c;
            if col == k { (val - expected).norm_sqr() } else { val.norm_sqr() + expected.norm_sqr() }
        })
        .sum();
    total.sqrt()
}

/// Unitarity residual of a monomial operator whose columns form a permutation.
fn monomial_unitary_residual(f: &Monomial) -> Option<f64> {
    let mut seen = vec![false; f.len()];
    for &(j, _) in f {
        if std::mem::replace(&mut seen[j], true) {
            return None;
        }
    }
    Some(f.iter().map(|(_, v)| (v.norm_sqr() - 1.0).powi(2)).sum::<f64>().sqrt())
}

/// Level `n-1` test operator: alternates general, Hermitian and span samples.
fn lower_sample(lab: &Lab, s: &mut Sampler, level: u32) -> Op {
    match s.index(3) {
        0 => s.matrix(level),
        1 => s.hermitian(level),
        _ => s.span(lab, level),
    }
}

fn cocycle_checks(r: &mut Runner) {
    let c = cocycle::build_standard_cocycle();
    r.record("cocycle/identity".into(), "Def 703", 1, 64, validate_cocycle(&c));
    let targets = [((A, B), 1.0), ((B, A), -1.0), ((A, C), 1.0), ((B, C), 1.0)];
    let dev = worst(targets.iter().map(|&((x, y), t)| (c.get(x, y) - Complex64::new(t, 0.0)).norm()));
    r.record("cocycle/constraints".into(), "§8.3", 1, 4, dev);
    let (b1, b2) = cocycle::standard_beta();
    let dev = (c.get(A, A) * b1 * b1 + c.get(B, B) * b2 * b2).norm();
    r.record("cocycle/beta".into(), "Ex 13.4", 1, 1, dev);
}

fn level_checks(r: &mut Runner, lab: &Lab, level: u32) {
    let elements = Lab::elements(level);
    let g = &lab.cocycle.group;

    let vs: Vec<Op> = elements.iter().map(|t| lab.v(t)).collect();
    let forms: Vec<Option<Monomial>> = vs.iter().map(monomial_form).collect();
    let mut count = 0;
    let mut dev: f64 = 0.0;
    for (i, s) in elements.iter().enumerate() {
        for (j, t) in elements.iter().enumerate() {
            let st: Vec<usize> = s.iter().zip(t).map(|(&x, &y)| g.mul(x, y)).collect();
            let k = index_of(&st);
            let phase = s.iter().zip(t).fold(Complex64::new(1.0, 0.0), |acc, (&x, &y)| acc * lab.cocycle.get(x, y));
            let res = match (level, &forms[i], &forms[j], &forms[k]) {
                (2.., Some(fs), Some(ft), Some(fst)) => monomial_product_residual(fs, ft, fst, phase),
                _ => residual(&(&vs[i] * &vs[j]), &(&vs[k] * phase)),
            };
            dev = max_nan(dev, res);
            count += 1;
        }
    }
    r.record(format!("projective/L{level}"), "Def 'a'", level, count, dev);

    let dev = worst(vs.iter().zip(&forms).map(|(v, f)| match f {
        Some(f) if level >= 2 => monomial_unitary_residual(f).unwrap_or_else(|| unitary_residual(v)),
        _ => unitary_residual(v),
    }));
    r.record(format!("unitary_v/L{level}"), "Def 'a'", level, elements.len(), dev);

    let w = lab.witness(level);
    r.record(format!("axiom_b/L{level}"), "Axiom 'b'", level, 1, lab.axiom_residuals(&w).max());

    let low = level - 1;
    r.run(format!("pr911/L{level}"), "Pr 911 c", level, INSTANCES, |s| {
        let (x, y) = (lower_sample(lab, s, low), lower_sample(lab, s, low));
        let agree = w.rho_agreement(&x).unwrap();
        let rx = w.rho(&x).unwrap();
        let mult = residual(&w.rho(&(&x * &y)).unwrap(), &(&rx * w.rho(&y).unwrap()));
        let iso = (op_norm(&rx) - op_norm(&x)).abs();
        worst([agree, mult, iso])
    });

    r.run(format!("pr914/L{level}"), "Pr 914", level, INSTANCES, |s| {
        let p = s.projection(low);
        let (_, res) = w.mvn_914(&p).unwrap();
        worst(res)
    });

    r.run(format!("pr931/L{level}"), "Pr 931", level, INSTANCES, |s| {
        let (x, y) = (lower_sample(lab, s, low), lower_sample(lab, s, low));
        worst(w.symmetry_931(&x, &y).unwrap())
    });

    r.run(format!("pr950/L{level}"), "Pr 950", level, INSTANCES, |s| {
        let (u, v) = (s.unitary(low), s.unitary(low));
        let (tu, tv) = (w.tau(&u).unwrap(), w.tau(&v).unwrap());
        let hom = residual(&w.tau(&(&u * &v)).unwrap(), &(&tu * &tv));
        let inverse = residual(&(&tu * w.tau(&u.adjoint()).unwrap()), &identity(level));
        let distance = (op_norm(&(&tu - identity(level))) - op_norm(&(&u - identity(low)))).abs();
        worst([unitary_residual(&tu), hom, inverse, distance])
    });

    r.run(format!("bott/L{level}"), "Def 982", level, INSTANCES, |s| {
        let p = s.projection(level);
        let at_one = residual(&bott_loop(&p, Complex64::new(1.0, 0.0)).unwrap(), &identity(level));
        worst(circle_samples(CIRCLE_SAMPLES).into_iter().map(|z| unitary_residual(&bott_loop(&p, z).unwrap())).chain([at_one]))
    });

    if level >= 2 {
        let (w1, w2) = (lab.witness(level - 1), lab.witness(level));
        r.run(format!("pr930/L{level}"), "Pr 930", level, INSTANCES, |s| {
            let (x, p, q) = s.partial_isometry(level - 2);
            mvn_conjugation_930(&w1, &w2, &p, &q, &x).unwrap().max_residual()
        });
    }
}

/// Exhaustive product rule and resolution of the identity for the digit operators.
fn lemma80_checks(r: &mut Runner, lab: &Lab, m: u32) {
    let d = DigitOperators::new(lab, 0, m);
    let l = d.l();
    let mut dev: f64 = 0.0;
    let mut count = 0;
    for i in 1..=m {
        let j = i - 1;
        for p in 0..=l {
            for q in 0..=l {
                for rr in 0..=l {
                    for s in 0..=l {
                        let got = d.pq(p, q, i) * d.pq(rr, s, i);
                        let expected = if (q >> j) & 1 != (rr >> j) & 1 { zeros(m) } else { d.pq(p, s, i).clone() };
                        dev = max_nan(dev, residual(&got, &expected));
                        count += 1;
                    }
                }
            }
        }
    }
    r.record(format!("lemma80a/m{m}"), "Lemma 80 a", m, count, dev);

    let total = (0..=l).fold(zeros(m), |acc, p| acc + d.pq_product(p, p));
    r.record(format!("lemma80c/m{m}"), "Lemma 80 c", m, 1, residual(&total, &identity(m)));
}

fn lemma82_check(r: &mut Runner, lab: &Lab, m: u32) {
    let d = DigitOperators::new(lab, 1, m);
    r.run(format!("lemma82/m{m}"), "Lemma 82 a", d.level(), INSTANCES, |s| {
        let a: Vec<Op> = (0..d.l()).map(|_| s.matrix(1)).collect();
        let x = d.nilpotent(&a);
        let power = (0..(1u32 << m)).fold(identity(d.level()), |acc, _| acc * &x);
        power.norm()
    });
}

fn higman_check(r: &mut Runner, lab: &Lab, m: u32) {
    let n = 1;
    let d = DigitOperators::new(lab, n, m);
    let samples = circle_samples(CIRCLE_SAMPLES);
    let id = format!("higman/m{m}");
    let mut s = Sampler::new(r.seed, &id);

    let mut polys: Vec<Vec<Op>> = vec![vec![identity(n)]];
    if m == 1 {
        let p = s.projection_of_rank(n, 1);
        polys.push(vec![identity(n) - &p, p]);
    }
    let mut attempts = 0;
    while polys.len() < 6 && attempts < 100 {
        attempts += 1;
        let coeffs: Vec<Op> = (0..=d.l()).map(|_| s.matrix(n)).collect();
        if samples.iter().all(|&z| {
            let xz = coeffs.iter().rev().fold(zeros(n), |acc, a| acc * z + a);
            min_singular_value(&xz) > 1e-3
        }) {
            polys.push(coeffs);
        }
    }

    let dev = worst(polys.iter().map(|coeffs| match higman_linearize(lab, n, m, coeffs, &samples) {
        Ok(lin) => worst(samples.iter().map(|&z| {
            let invertible = min_singular_value(&lin.eval(z)) > 0.0;
            if invertible { lin.endpoint_residual(z) } else { f64::INFINITY }
        })),
        Err(_) => f64::INFINITY,
    }));
    r.record(id, "Pr 83", d.level(), polys.len() * samples.len(), dev);
}

/// Runs every check with matrices up to level `levels` (`1..=4`).
pub fn run_battery(levels: u32, tolerance: f64, seed: u64) -> BatteryReport {
    assert!((1..=MAX_LEVEL).contains(&levels), "levels must be in 1..={MAX_LEVEL}");
    let lab = Lab::standard();
    let mut r = Runner { seed, tolerance, checks: Vec::new() };
    cocycle_checks(&mut r);
    for level in 1..=levels {
        level_checks(&mut r, &lab, level);
    }
    for m in 1..=2u32.min(levels) {
        lemma80_checks(&mut r, &lab, m);
    }
    for m in 1..=2u32 {
        if m < levels {
            lemma82_check(&mut r, &lab, m);
            higman_check(&mut r, &lab, m);
        }
    }
    r.checks.sort_by(|a, b| a.id.cmp(&b.id));
    BatteryReport { levels, seed, tolerance, checks: r.checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_battery_passes() {
        let report = run_battery(1, DEFAULT_TOLERANCE, 0);
        assert!(report.all_passed(), "{}", report.render_text());
        assert_eq!(report.get("cocycle/identity").unwrap().max_residual, 0.0);
        assert!(report.get("pr930/L1").is_none());
    }

    #[test]
    fn ids_are_sorted_and_unique() {
        let report = run_battery(2, DEFAULT_TOLERANCE, 5);
        let ids: Vec<&str> = report.checks.iter().map(|c| c.id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn tight_tolerance_keeps_exact_checks_passing() {
        let report = run_battery(1, 1e-15, 0);
        for id in ["cocycle/identity", "cocycle/constraints", "cocycle/beta", "projective/L1"] {
            assert!(report.get(id).unwrap().passed, "{id}");
        }
    }

    #[test]
    fn monomial_shortcuts_match_dense_products() {
        let lab = Lab::standard();
        let elements = Lab::elements(2);
        let vs: Vec<Op> = elements.iter().map(|t| lab.v(t)).collect();
        let forms: Vec<Monomial> = vs.iter().map(|v| monomial_form(v).unwrap()).collect();
        for i in 0..16 {
            assert_eq!(monomial_unitary_residual(&forms[i]), Some(0.0));
            for j in 0..16 {
                for k in [0, 5, 15] {
                    let phase = cocycle::root(((i + j + k) % 8) as u8);
                    let dense = residual(&(&vs[i] * &vs[j]), &(&vs[k] * phase));
                    let sparse = monomial_product_residual(&forms[i], &forms[j], &forms[k], phase);
                    assert!((dense - sparse).abs() < 1e-12, "{i} {j} {k}");
                }
            }
        }
        let mut doubled = forms[3].clone();
        doubled[0].1 *= 2.0;
        assert!((monomial_unitary_residual(&doubled).unwrap() - 3.0).abs() < 1e-12);
        doubled[1].0 = doubled[0].0;
        assert_eq!(monomial_unitary_residual(&doubled), None);
    }

    #[test]
    fn same_seed_same_report() {
        assert_eq!(run_battery(2, DEFAULT_TOLERANCE, 9), run_battery(2, DEFAULT_TOLERANCE, 9));
    }
}
