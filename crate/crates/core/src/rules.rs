//! Structural evaluation of space descriptions to formal K-groups.
//!
//! Every constructor maps to one catalogued [`Rule`]. Leaf rules produce the
//! group `K_i` for a generic index `i`, written as a [`GroupExpr`] at even
//! index; the odd-index group is its [`GroupExpr::shift`]. A result of the form
//! `K_{i+n}(F)` is `K0F` shifted `n mod 2` times.

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{self, AbelianError, Assumption, ConcreteGroup, GroupExpr, KPair};
use crate::spaces::{self, SpaceExpr, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("invalid space description: {}", render_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("exponent arithmetic overflowed at `{0}`")]
    Overflow(String),
    #[error(transparent)]
    Group(#[from] AbelianError),
}

fn render_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// The closed rule catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    FiniteSpace,
    Ball,
    BallMinusPoints,
    Euclid,
    Sphere,
    SphereMinusPoints,
    EuclidMinusPoints,
    SphereMinusSphere,
    BallMinusSphere,
    Sum,
    Alexandroff,
    SphereProduct,
    SphereProductMinusPoints,
    Graph,
    BallMinusGraph,
    Surface,
    SurfaceMinusPoints,
    Mobius,
    MobiusMinusPoints,
    Projective2,
    KleinOpen,
    Wedge,
    Chain,
    IdentifiedSpheres,
}

impl Rule {
    pub const ALL: [Rule; 24] = [
        Rule::FiniteSpace,
        Rule::Ball,
        Rule::BallMinusPoints,
        Rule::Euclid,
        Rule::Sphere,
        Rule::SphereMinusPoints,
        Rule::EuclidMinusPoints,
        Rule::SphereMinusSphere,
        Rule::BallMinusSphere,
        Rule::Sum,
        Rule::Alexandroff,
        Rule::SphereProduct,
        Rule::SphereProductMinusPoints,
        Rule::Graph,
        Rule::BallMinusGraph,
        Rule::Surface,
        Rule::SurfaceMinusPoints,
        Rule::Mobius,
        Rule::MobiusMinusPoints,
        Rule::Projective2,
        Rule::KleinOpen,
        Rule::Wedge,
        Rule::Chain,
        Rule::IdentifiedSpheres,
    ];

    /// Stable identifier `R1`..`R24`.
    pub fn id(&self) -> &'static str {
        const IDS: [&str; 24] = [
            "R1", "R2", "R3", "R4", "R5", "R6", "R7", "R8", "R9", "R10", "R11", "R12", "R13", "R14",
            "R15", "R16", "R17", "R18", "R19", "R20", "R21", "R22", "R23", "R24",
        ];
        IDS[*self as usize]
    }

    /// Source statement the rule implements.
    pub fn citation(&self) -> &'static str {
        match self {
            Rule::FiniteSpace => "Lemma 14.9' c",
            Rule::Ball => "Thm 17.1'b a",
            Rule::BallMinusPoints => "Thm 17.1'b e3",
            Rule::Euclid => "Thm 17.1'c a",
            Rule::Sphere => "Thm 17.1'c b",
            Rule::SphereMinusPoints => "Thm 17.1'c e3",
            Rule::EuclidMinusPoints => "Thm 17.1'c d",
            Rule::SphereMinusSphere => "Thm 17.1'c f",
            Rule::BallMinusSphere => "Thm 17.1'c g",
            Rule::Sum => "Pr 14.11",
            Rule::Alexandroff => "Thm 20.4 a",
            Rule::SphereProduct => "Pr 12.5'a a",
            Rule::SphereProductMinusPoints => "Pr 12.5'a b",
            Rule::Graph => "Cor 3.11",
            Rule::BallMinusGraph => "Cor 22.5'",
            Rule::Surface | Rule::SurfaceMinusPoints => "Cor 10.6'",
            Rule::Mobius => "Pr 27.1'a b",
            Rule::MobiusMinusPoints => "Pr 27.1'a e",
            Rule::Projective2 => "Cor 21.6'",
            Rule::KleinOpen => "Pr 28.1'b d",
            Rule::Wedge => "Cor 20.1'a b",
            Rule::Chain => "Pr 16.5",
            Rule::IdentifiedSpheres => "Pr 15.4'",
        }
    }

    /// Rules whose output carries free exponents of their own (all but `Sum`).
    pub fn has_exponents(&self) -> bool {
        *self != Rule::Sum
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rule::ALL.into_iter().find(|r| r.id().eq_ignore_ascii_case(s)).ok_or_else(|| format!("unknown rule `{s}`"))
    }
}

/// One node of a derivation tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub rule: Rule,
    pub citation: String,
    pub conclusion: String,
    pub children: Vec<Step>,
}

impl Step {
    /// Pre-order traversal with depths.
    pub fn flatten(&self) -> Vec<(usize, &Step)> {
        let mut out = Vec::new();
        fn walk<'a>(s: &'a Step, depth: usize, out: &mut Vec<(usize, &'a Step)>) {
            out.push((depth, s));
            for c in &s.children {
                walk(c, depth + 1, out);
            }
        }
        walk(self, 0, &mut out);
        out
    }

    pub fn step_count(&self) -> usize {
        1 + self.children.iter().map(Step::step_count).sum::<usize>()
    }

    /// Indented rendering, one step per line.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (depth, step) in self.flatten() {
            s.push_str(&"  ".repeat(depth));
            s.push_str(&format!("[{}] {}: {}\n", step.rule.id(), step.citation, step.conclusion));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluation {
    pub kpair: KPair,
    pub derivation: Step,
}

/// Which free atom of a rule's own contribution a [`Mutation`] perturbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Exponent {
    /// Exponent of `K_i(F)`.
    Same,
    /// Exponent of `K_{i+1}(F)`.
    Next,
}

/// A deliberate ±1 perturbation of one rule exponent, for sensitivity testing
/// of the consistency checks. Perturbations that would go negative are skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mutation {
    pub rule: Rule,
    pub exponent: Exponent,
    pub delta: i64,
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = match self.exponent {
            Exponent::Same => "same",
            Exponent::Next => "next",
        };
        write!(f, "{}:{}:{:+}", self.rule.id(), e, self.delta)
    }
}

impl FromStr for Mutation {
    type Err = String;

    /// `RULE:same|next:DELTA`, e.g. `R3:next:+1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [rule, exp, delta] = parts[..] else {
            return Err(format!("expected RULE:same|next:DELTA, got `{s}`"));
        };
        let exponent = match exp {
            "same" => Exponent::Same,
            "next" => Exponent::Next,
            other => return Err(format!("unknown exponent `{other}`")),
        };
        let delta = delta.parse::<i64>().map_err(|e| format!("bad delta `{delta}`: {e}"))?;
        Ok(Mutation { rule: rule.parse()?, exponent, delta })
    }
}

/// Evaluates space descriptions, optionally with one rule perturbed.
#[derive(Debug, Default)]
pub struct Evaluator {
    mutation: Option<Mutation>,
    applied: Cell<usize>,
}

fn k(n: u64) -> GroupExpr {
    GroupExpr::free(n, 0)
}

fn k_next(n: u64) -> GroupExpr {
    GroupExpr::free(0, n)
}

fn is_even(n: u64) -> bool {
    n % 2 == 0
}

fn count_parity(dims: &[u64]) -> (u64, u64) {
    let even = dims.iter().filter(|d| is_even(**d)).count() as u64;
    (even, dims.len() as u64 - even)
}

/// `K_i(F)^a × K_{i+1}(F)^b × (K_i(F)/2)^c × (K_{i+1}(F)/2)^d`.
pub fn describe_indexed(g: &GroupExpr) -> String {
    let terms = [
        (g.k0f, "K_i(F)"),
        (g.k1f, "K_{i+1}(F)"),
        (g.k0f_mod2, "K_i(F)/2K_i(F)"),
        (g.k1f_mod2, "K_{i+1}(F)/2K_{i+1}(F)"),
    ];
    let parts: Vec<String> = terms
        .iter()
        .filter(|(m, _)| *m != 0)
        .map(|(m, atom)| if *m == 1 { atom.to_string() } else { format!("{atom}^{m}") })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" × ")
    }
}

impl Evaluator {
    pub fn new() -> Self {
        Evaluator::default()
    }

    pub fn with_mutation(mutation: Mutation) -> Self {
        Evaluator { mutation: Some(mutation), applied: Cell::new(0) }
    }

    pub fn mutation(&self) -> Option<Mutation> {
        self.mutation
    }

    /// How many times the mutation has changed a rule output so far.
    pub fn mutation_applications(&self) -> usize {
        self.applied.get()
    }

    /// Validates, then evaluates.
    pub fn eval(&self, x: &SpaceExpr) -> Result<Evaluation, EvalError> {
        let violations = spaces::validate(x);
        if !violations.is_empty() {
            return Err(EvalError::Invalid(violations));
        }
        self.eval_node(x)
    }

    fn mutate(&self, rule: Rule, g: GroupExpr) -> GroupExpr {
        let Some(m) = self.mutation.filter(|m| m.rule == rule) else {
            return g;
        };
        let slot = match m.exponent {
            Exponent::Same => g.k0f,
            Exponent::Next => g.k1f,
        };
        let Some(v) = slot.checked_add_signed(m.delta) else {
            return g;
        };
        self.applied.set(self.applied.get() + 1);
        match m.exponent {
            Exponent::Same => GroupExpr { k0f: v, ..g },
            Exponent::Next => GroupExpr { k1f: v, ..g },
        }
    }

    fn leaf(&self, x: &SpaceExpr, rule: Rule, g: GroupExpr, assumptions: &[Assumption], note: &str) -> Evaluation {
        let g = self.mutate(rule, g);
        let mut kpair = KPair::from_indexed(g);
        kpair.assumptions.extend(assumptions.iter().copied());
        let mut conclusion = format!("K_i({}) ≅ {}", spaces::canonical(x), describe_indexed(&g));
        if !note.is_empty() {
            conclusion.push_str("; ");
            conclusion.push_str(note);
        }
        Evaluation {
            kpair,
            derivation: Step { rule, citation: rule.citation().into(), conclusion, children: Vec::new() },
        }
    }

    fn eval_node(&self, x: &SpaceExpr) -> Result<Evaluation, EvalError> {
        let overflow = || EvalError::Overflow(spaces::canonical(x));
        let pow2 = |n: u64| -> Result<u64, EvalError> {
            u32::try_from(n).ok().and_then(|n| 1u64.checked_shl(n)).filter(|v| *v != 0).ok_or_else(overflow)
        };
        let none: &[Assumption] = &[];
        let ev = match x {
            SpaceExpr::Point => self.leaf(x, Rule::FiniteSpace, k(1), none, ""),
            SpaceExpr::FiniteSet(n) => self.leaf(x, Rule::FiniteSpace, k(*n), none, ""),
            SpaceExpr::Ball(_) => self.leaf(x, Rule::Ball, k(1), none, ""),
            SpaceExpr::Euclid(n) => self.leaf(x, Rule::Euclid, GroupExpr::K0F.shift_by(*n), none, ""),
            SpaceExpr::Sphere(n) => self.leaf(x, Rule::Sphere, k(1) + GroupExpr::K0F.shift_by(*n), none, ""),
            SpaceExpr::SphereMinusSphere { n, m } => {
                // K_{i+n}(F) × K_{i+m+1}(F); equal to K_i(F) × K_{i+n-m+1}(F) for odd m
                let g = GroupExpr::K0F.shift_by(*n) + GroupExpr::K0F.shift_by(m.wrapping_add(1) % 2);
                self.leaf(x, Rule::SphereMinusSphere, g, none, "")
            }
            SpaceExpr::BallMinusSphere { m, .. } => {
                let shift = m.checked_add(1).ok_or_else(overflow)?;
                self.leaf(x, Rule::BallMinusSphere, GroupExpr::K0F.shift_by(shift), none, "")
            }
            SpaceExpr::ProductOfSpheres(dims) => {
                let n = dims.len() as u64;
                let g = if dims.iter().all(|d| is_even(*d)) {
                    k(pow2(n)?)
                } else {
                    let h = pow2(n - 1)?;
                    GroupExpr::free(h, h)
                };
                self.leaf(x, Rule::SphereProduct, g, none, "")
            }
            SpaceExpr::Graph { s, vertices, chords } => {
                let q = (s + chords).checked_sub(*vertices).ok_or_else(overflow)?;
                self.leaf(x, Rule::Graph, GroupExpr::free(*s, q), none, "")
            }
            SpaceExpr::BallMinusGraph { s, vertices, chords, .. } => {
                let p = (s + chords).checked_sub(*vertices).ok_or_else(overflow)?;
                self.leaf(x, Rule::BallMinusGraph, GroupExpr::free(p, s - 1), none, "")
            }
            SpaceExpr::Surface(g) => {
                let q = g.checked_mul(3).ok_or_else(overflow)? - 1;
                self.leaf(x, Rule::Surface, GroupExpr::free(g + 1, q), none, "")
            }
            SpaceExpr::Mobius => self.leaf(x, Rule::Mobius, GroupExpr::free(1, 1), none, ""),
            SpaceExpr::Projective2 => self.leaf(
                x,
                Rule::Projective2,
                GroupExpr::new(1, 0, 1, 0),
                &[Assumption::No2TorsionK0F, Assumption::No2TorsionK1F],
                "requires 2a = 0 ⇒ a = 0 in K_i(F)",
            ),
            SpaceExpr::KleinOpen => self.leaf(
                x,
                Rule::KleinOpen,
                GroupExpr::new(0, 0, 1, 0),
                &[Assumption::No2TorsionK0F, Assumption::No2TorsionK1F],
                "requires the index map δ_i to be injective, equivalently K_{i+1}(F) without 2-torsion",
            ),
            SpaceExpr::WedgeOfSpheres(dims) => {
                let (even, odd) = count_parity(dims);
                self.leaf(x, Rule::Wedge, GroupExpr::free(even + 1, odd), none, "")
            }
            SpaceExpr::ChainOfSpheres(dims) => {
                let (even, odd) = count_parity(dims);
                self.leaf(x, Rule::Chain, GroupExpr::free(even + 1, odd), none, "")
            }
            SpaceExpr::IdentifiedSpheres { dims, gammas } => {
                let total: u64 = gammas.iter().try_fold(0u64, |a, g| a.checked_add(*g)).ok_or_else(overflow)?;
                let q = (total + 1)
                    .checked_sub(dims.len() as u64 + gammas.len() as u64)
                    .ok_or_else(overflow)?;
                let spheres: GroupExpr = dims.iter().map(|d| GroupExpr::K0F.shift_by(*d)).sum();
                self.leaf(
                    x,
                    Rule::IdentifiedSpheres,
                    k(1) + k_next(q) + spheres,
                    &[Assumption::ConnectedInput],
                    "assumes the identified space is connected",
                )
            }
            SpaceExpr::MinusPoints { base, k: c } => {
                let c = *c;
                match base.as_ref() {
                    SpaceExpr::Ball(_) => self.leaf(x, Rule::BallMinusPoints, k_next(c - 1), none, ""),
                    SpaceExpr::Sphere(n) => {
                        let g = if is_even(*n) { GroupExpr::free(1, c - 1) } else { k_next(c) };
                        self.leaf(x, Rule::SphereMinusPoints, g, none, "")
                    }
                    SpaceExpr::Euclid(n) => {
                        let g = if is_even(*n) {
                            GroupExpr::free(1, c)
                        } else {
                            k_next(c.checked_add(1).ok_or_else(overflow)?)
                        };
                        self.leaf(x, Rule::EuclidMinusPoints, g, none, "")
                    }
                    SpaceExpr::ProductOfSpheres(dims) => {
                        let n = dims.len() as u64;
                        let g = if dims.iter().all(|d| is_even(*d)) {
                            GroupExpr::free(pow2(n)? - 1, c - 1)
                        } else {
                            let h = pow2(n - 1)?;
                            GroupExpr::free(h - 1, h.checked_add(c).ok_or_else(overflow)? - 1)
                        };
                        self.leaf(x, Rule::SphereProductMinusPoints, g, none, "")
                    }
                    SpaceExpr::Surface(g) => {
                        let q = g.checked_mul(3).and_then(|v| v.checked_add(c)).ok_or_else(overflow)? - 2;
                        self.leaf(x, Rule::SurfaceMinusPoints, GroupExpr::free(*g, q), none, "")
                    }
                    SpaceExpr::Mobius => self.leaf(x, Rule::MobiusMinusPoints, k_next(c), none, ""),
                    other => unreachable!("validation admits no point removal from `{}`", other.kind()),
                }
            }
            SpaceExpr::Sum(children) => {
                let evals = children.iter().map(|c| self.eval_node(c)).collect::<Result<Vec<_>, _>>()?;
                let mut kpair = KPair::default();
                for e in &evals {
                    kpair = KPair {
                        k0: kpair.k0.checked_add(e.kpair.k0).ok_or_else(overflow)?,
                        k1: kpair.k1.checked_add(e.kpair.k1).ok_or_else(overflow)?,
                        assumptions: kpair.assumptions.union(&e.kpair.assumptions).copied().collect(),
                    };
                }
                let conclusion =
                    format!("K_i({}) ≅ {}", spaces::canonical(x), describe_indexed(&kpair.k0));
                Evaluation {
                    kpair,
                    derivation: Step {
                        rule: Rule::Sum,
                        citation: Rule::Sum.citation().into(),
                        conclusion,
                        children: evals.into_iter().map(|e| e.derivation).collect(),
                    },
                }
            }
            SpaceExpr::Alexandroff(child) => {
                let inner = self.eval_node(child)?;
                let own = self.mutate(Rule::Alexandroff, k(1));
                let own = KPair::from_indexed(own);
                let kpair = KPair {
                    k0: own.k0.checked_add(inner.kpair.k0).ok_or_else(overflow)?,
                    k1: own.k1.checked_add(inner.kpair.k1).ok_or_else(overflow)?,
                    assumptions: inner.kpair.assumptions.clone(),
                };
                let conclusion =
                    format!("K_i({}) ≅ {}", spaces::canonical(x), describe_indexed(&kpair.k0));
                Evaluation {
                    kpair,
                    derivation: Step {
                        rule: Rule::Alexandroff,
                        citation: Rule::Alexandroff.citation().into(),
                        conclusion,
                        children: vec![inner.derivation],
                    },
                }
            }
        };
        Ok(ev)
    }
}

/// Formal K-groups of `C0(x, F)` with a derivation trace.
pub fn eval_formal(x: &SpaceExpr) -> Result<Evaluation, EvalError> {
    Evaluator::new().eval(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssumptionStatus {
    Satisfied,
    Violated,
    /// Not decidable from the coefficient groups (e.g. connectivity of the input).
    Unverified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub tag: Assumption,
    pub status: AssumptionStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteEvaluation {
    pub k0: ConcreteGroup,
    pub k1: ConcreteGroup,
    pub assumptions: Vec<AssumptionCheck>,
    pub formal: Evaluation,
}

impl ConcreteEvaluation {
    pub fn violated(&self) -> impl Iterator<Item = &AssumptionCheck> {
        self.assumptions.iter().filter(|a| a.status == AssumptionStatus::Violated)
    }
}

/// Status of each attached hypothesis for concrete coefficient groups.
pub fn check_assumptions(kpair: &KPair, g0: &ConcreteGroup, g1: &ConcreteGroup) -> Vec<AssumptionCheck> {
    let status = |ok: bool| if ok { AssumptionStatus::Satisfied } else { AssumptionStatus::Violated };
    kpair
        .assumptions
        .iter()
        .map(|&tag| AssumptionCheck {
            tag,
            status: match tag {
                Assumption::No2TorsionK0F => status(g0.has_no_2_torsion()),
                Assumption::No2TorsionK1F => status(g1.has_no_2_torsion()),
                Assumption::ConnectedInput => AssumptionStatus::Unverified,
            },
        })
        .collect()
}

/// [`eval_formal`] followed by substitution of `K0(F) = g0`, `K1(F) = g1`.
pub fn eval_concrete(x: &SpaceExpr, g0: &ConcreteGroup, g1: &ConcreteGroup) -> Result<ConcreteEvaluation, EvalError> {
    let formal = eval_formal(x)?;
    let k0 = abelian::instantiate(&formal.kpair.k0, g0, g1)?;
    let k1 = abelian::instantiate(&formal.kpair.k1, g0, g1)?;
    let assumptions = check_assumptions(&formal.kpair, g0, g1);
    Ok(ConcreteEvaluation { k0, k1, assumptions, formal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn eval(text: &str) -> Evaluation {
        eval_formal(&parse(text).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        let e = eval("ball(3)\\2");
        assert_eq!((e.kpair.k0, e.kpair.k1), (GroupExpr::K1F, GroupExpr::K0F));

        let e = eval("graph(s=1,v=5,e=7)");
        assert_eq!(e.kpair.k0, GroupExpr::free(1, 3));
        assert_eq!(e.kpair.k1, GroupExpr::free(3, 1));

        assert_eq!(eval("surface(2)\\3").kpair.k0, GroupExpr::free(2, 7));

        let e = eval("rp2");
        assert_eq!(e.kpair.k0, GroupExpr::new(1, 0, 1, 0));
        assert_eq!(e.kpair.k1, GroupExpr::new(0, 1, 0, 1));
        assert_eq!(
            e.kpair.assumptions.iter().copied().collect::<Vec<_>>(),
            vec![Assumption::No2TorsionK0F, Assumption::No2TorsionK1F]
        );

        assert_eq!(eval("spheres(1,1)").kpair.k0, GroupExpr::free(2, 2));

        let e = eval("point");
        assert_eq!((e.kpair.k0, e.kpair.k1), (GroupExpr::K0F, GroupExpr::K1F));
    }

    #[test]
    fn invalid_input_is_rejected_with_findings() {
        match eval_formal(&SpaceExpr::Ball(0)) {
            Err(EvalError::Invalid(v)) => assert_eq!(v[0].constraint, "dimension must be ≥ 1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn concrete_examples() {
        let z = ConcreteGroup::free(1);
        let zero = ConcreteGroup::trivial();

        let c = eval_concrete(&SpaceExpr::Projective2, &z, &zero).unwrap();
        assert_eq!(c.k0, ConcreteGroup::new(1, &[2]).unwrap());
        assert!(c.k1.is_trivial());
        assert!(c.assumptions.iter().all(|a| a.status == AssumptionStatus::Satisfied));

        let c = eval_concrete(&SpaceExpr::Sphere(2), &z, &zero).unwrap();
        assert_eq!((c.k0, c.k1), (ConcreteGroup::free(2), zero.clone()));

        let z4 = ConcreteGroup::cyclic(4).unwrap();
        let c = eval_concrete(&SpaceExpr::KleinOpen, &z4, &zero).unwrap();
        assert_eq!(c.k0, ConcreteGroup::cyclic(2).unwrap());
        assert!(c.k1.is_trivial());
        let violated: Vec<_> = c.violated().map(|a| a.tag).collect();
        assert_eq!(violated, vec![Assumption::No2TorsionK0F]);
    }

    #[test]
    fn connectivity_is_reported_unverified() {
        let x = parse("identify_spheres(dims=[1,2],gamma=[2])").unwrap();
        let c = eval_concrete(&x, &ConcreteGroup::free(1), &ConcreteGroup::trivial()).unwrap();
        assert_eq!(c.assumptions.len(), 1);
        assert_eq!(c.assumptions[0].status, AssumptionStatus::Unverified);
    }

    #[test]
    fn derivation_has_one_step_per_node() {
        let x = parse("alex(sum(sphere(2),point,ball(2)\\3))").unwrap();
        let e = eval_formal(&x).unwrap();
        assert_eq!(e.derivation.step_count(), x.node_count());
        let rules: Vec<&str> = e.derivation.flatten().iter().map(|(_, s)| s.rule.id()).collect();
        assert_eq!(rules, ["R11", "R10", "R5", "R1", "R3"]);
    }

    #[test]
    fn mutation_changes_only_the_target_rule() {
        let m: Mutation = "R3:next:+1".parse().unwrap();
        assert_eq!(m.to_string(), "R3:next:+1");
        let ev = Evaluator::with_mutation(m);
        let x = parse("sum(ball(2)\\2,sphere(1))").unwrap();
        let got = ev.eval(&x).unwrap().kpair.k0;
        assert_eq!(got, GroupExpr::free(0, 2) + GroupExpr::free(1, 1));
        assert_eq!(ev.mutation_applications(), 1);

        // below zero: skipped
        let ev = Evaluator::with_mutation("R2:next:-1".parse().unwrap());
        assert_eq!(ev.eval(&SpaceExpr::Ball(1)).unwrap().kpair.k0, GroupExpr::K0F);
        assert_eq!(ev.mutation_applications(), 0);
    }

    #[test]
    fn overflow_is_an_error_not_a_panic() {
        let x = SpaceExpr::ProductOfSpheres(vec![2; 70]);
        assert!(matches!(eval_formal(&x), Err(EvalError::Overflow(_))));
        let x = SpaceExpr::Surface(u64::MAX);
        assert!(matches!(eval_formal(&x), Err(EvalError::Overflow(_))));
    }
}
