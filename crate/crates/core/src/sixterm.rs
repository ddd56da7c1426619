//! Rank-level consistency of computed K-groups with six-term exact sequences.
//!
//! For a closed subset `Z` of `X` with open complement `U`, exactness of
//! `K0(U) → K0(X) → K0(Z) → K1(U) → K1(X) → K1(Z) → K0(U)` forces the
//! alternating sum of free ranks to vanish. Only ranks are checked: torsion
//! constraints would need the connecting maps, which are not modelled.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::abelian::{GroupExpr, KPair};
use crate::rules::{EvalError, Evaluator, Exponent, Mutation, Rule};
use crate::spaces::SpaceExpr;

/// Six groups in cyclic order `K0(U), K0(X), K0(Z), K1(U), K1(X), K1(Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hexagon(pub [GroupExpr; 6]);

impl Hexagon {
    pub fn from_pieces(open: &KPair, whole: &KPair, closed: &KPair) -> Self {
        Hexagon([open.k0, whole.k0, closed.k0, open.k1, whole.k1, closed.k1])
    }

    /// Alternating sum of the `(K0F, K1F)` multiplicities; mod-2 atoms have rank 0.
    pub fn alternating_sum(&self) -> [i128; 2] {
        self.0.iter().enumerate().fold([0, 0], |[a, b], (j, g)| {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            [a + sign * g.k0f as i128, b + sign * g.k1f as i128]
        })
    }

    pub fn rank_check(&self) -> bool {
        self.alternating_sum() == [0, 0]
    }

    /// Cyclic rotation by `steps` positions.
    pub fn rotated(&self, steps: usize) -> Self {
        let mut out = self.0;
        out.rotate_left(steps % 6);
        Hexagon(out)
    }

    /// Index shift applied to every entry.
    pub fn shifted(&self) -> Self {
        Hexagon(self.0.map(GroupExpr::shift))
    }
}

/// One of the three terms of a fixture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    Space(SpaceExpr),
    /// A space outside the description language whose groups are quoted directly.
    Stated { label: &'static str, kpair: KPair },
}

impl Piece {
    fn eval(&self, ev: &Evaluator) -> Result<KPair, EvalError> {
        match self {
            Piece::Space(x) => ev.eval(x).map(|e| e.kpair),
            Piece::Stated { kpair, .. } => Ok(kpair.clone()),
        }
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Piece::Space(x) => write!(f, "{x}"),
            Piece::Stated { label, .. } => f.write_str(label),
        }
    }
}

/// `(U, X, Z)` with `Z` closed in `X` and `U = X \ Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub id: String,
    pub family: &'static str,
    pub open: Piece,
    pub whole: Piece,
    pub closed: Piece,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureResult {
    pub id: String,
    pub family: String,
    pub passed: bool,
    pub alternating_sum: Option<[i128; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogueReport {
    pub results: Vec<FixtureResult>,
}

impl CatalogueReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &FixtureResult> {
        self.results.iter().filter(|r| !r.passed)
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        for r in &self.results {
            let status = if r.passed { "pass" } else { "FAIL" };
            match (&r.alternating_sum, &r.error) {
                (_, Some(e)) => s.push_str(&format!("{status} {} error: {e}\n", r.id)),
                (Some([a, b]), None) => s.push_str(&format!("{status} {} alternating sum ({a}, {b})\n", r.id)),
                (None, None) => s.push_str(&format!("{status} {}\n", r.id)),
            }
        }
        let passed = self.results.iter().filter(|r| r.passed).count();
        s.push_str(&format!("{passed}/{} hexagons rank-consistent (ranks only; torsion not checked)\n", self.results.len()));
        s
    }
}

impl Fixture {
    fn new(family: &'static str, id: String, open: Piece, whole: Piece, closed: Piece) -> Self {
        Fixture { id: format!("{family}/{id}"), family, open, whole, closed }
    }

    fn spaces(family: &'static str, id: String, open: SpaceExpr, whole: SpaceExpr, closed: SpaceExpr) -> Self {
        Fixture::new(family, id, Piece::Space(open), Piece::Space(whole), Piece::Space(closed))
    }

    pub fn hexagon(&self, ev: &Evaluator) -> Result<Hexagon, EvalError> {
        Ok(Hexagon::from_pieces(&self.open.eval(ev)?, &self.whole.eval(ev)?, &self.closed.eval(ev)?))
    }

    pub fn check(&self, ev: &Evaluator) -> FixtureResult {
        let (passed, alternating_sum, error) = match self.hexagon(ev) {
            Ok(h) => (h.rank_check(), Some(h.alternating_sum()), None),
            Err(e) => (false, None, Some(e.to_string())),
        };
        FixtureResult { id: self.id.clone(), family: self.family.to_string(), passed, alternating_sum, error }
    }
}

fn points(k: u64) -> SpaceExpr {
    if k == 1 {
        SpaceExpr::Point
    } else {
        SpaceExpr::FiniteSet(k)
    }
}

fn minus(base: SpaceExpr, k: u64) -> SpaceExpr {
    SpaceExpr::minus_points(base, k)
}

fn sum_or_single(mut parts: Vec<SpaceExpr>) -> SpaceExpr {
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        SpaceExpr::Sum(parts)
    }
}

fn list(ds: &[u64]) -> String {
    ds.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// Compact graphs `(s, r0, r1)` used by the graph fixtures.
const COMPACT_GRAPHS: [(u64, u64, u64); 7] =
    [(1, 1, 1), (1, 2, 1), (1, 3, 3), (2, 4, 2), (1, 4, 6), (1, 5, 8), (2, 5, 5)];

/// Identified-sphere fixtures: dims, class sizes, and how many marked points lie on each sphere.
const IDENTIFIED: [(&[u64], &[u64], &[u64]); 5] = [
    (&[1, 2], &[2], &[1, 1]),
    (&[2, 2, 3], &[2, 2], &[1, 2, 1]),
    (&[1], &[3], &[3]),
    (&[1, 1], &[2, 2], &[2, 2]),
    (&[2, 4], &[3], &[2, 1]),
];

/// The built-in catalogue, in a fixed order.
pub fn catalogue() -> Vec<Fixture> {
    let mut out = Vec::new();

    for n in 1..=3 {
        for k in 1..=3 {
            out.push(Fixture::spaces("ball", format!("n={n},k={k}"), minus(SpaceExpr::Ball(n), k), SpaceExpr::Ball(n), points(k)));
        }
    }
    for n in 1..=4 {
        for k in 1..=3 {
            out.push(Fixture::spaces("euclid", format!("n={n},k={k}"), minus(SpaceExpr::Euclid(n), k), SpaceExpr::Euclid(n), points(k)));
            out.push(Fixture::spaces("sphere", format!("n={n},k={k}"), minus(SpaceExpr::Sphere(n), k), SpaceExpr::Sphere(n), points(k)));
        }
        out.push(Fixture::spaces("sphere_point", format!("n={n}"), SpaceExpr::Euclid(n), SpaceExpr::Sphere(n), SpaceExpr::Point));
    }
    let products: [&[u64]; 6] = [&[1, 1], &[2, 2], &[1, 2], &[2, 2, 2], &[1, 1, 1], &[2, 3, 4, 1]];
    for dims in products {
        for k in 1..=3 {
            let x = SpaceExpr::ProductOfSpheres(dims.to_vec());
            out.push(Fixture::spaces("spheres", format!("dims={},k={k}", list(dims)), minus(x.clone(), k), x, points(k)));
        }
    }
    for g in 1..=4 {
        for k in 1..=3 {
            out.push(Fixture::spaces("surface", format!("g={g},k={k}"), minus(SpaceExpr::Surface(g), k), SpaceExpr::Surface(g), points(k)));
        }
    }
    for k in 1..=3 {
        out.push(Fixture::spaces("mobius", format!("k={k}"), minus(SpaceExpr::Mobius, k), SpaceExpr::Mobius, points(k)));
    }
    for n in 2..=5 {
        for m in 1..n {
            out.push(Fixture::spaces(
                "sphere_minus_sphere",
                format!("n={n},m={m}"),
                SpaceExpr::SphereMinusSphere { n, m },
                SpaceExpr::Sphere(n),
                SpaceExpr::Sphere(m),
            ));
            out.push(Fixture::spaces(
                "ball_minus_sphere",
                format!("n={n},m={m}"),
                SpaceExpr::BallMinusSphere { n, m },
                SpaceExpr::Ball(n),
                SpaceExpr::Sphere(m),
            ));
        }
    }
    for (s, v, e) in COMPACT_GRAPHS {
        let graph = SpaceExpr::Graph { s, vertices: v, chords: e };
        for n in 2..=3 {
            out.push(Fixture::spaces(
                "ball_minus_graph",
                format!("n={n},s={s},v={v},e={e}"),
                SpaceExpr::BallMinusGraph { n, s, vertices: v, chords: e },
                SpaceExpr::Ball(n),
                graph.clone(),
            ));
        }
        if v >= 2 {
            // removing a vertex makes its component non-compact
            out.push(Fixture::spaces(
                "graph_vertex",
                format!("s={s},v={v},e={e}"),
                SpaceExpr::Graph { s: s - 1, vertices: v - 1, chords: e },
                graph,
                SpaceExpr::Point,
            ));
        }
    }
    let alex_children = [
        SpaceExpr::Euclid(2),
        SpaceExpr::Sum(vec![SpaceExpr::Euclid(1), SpaceExpr::Euclid(2)]),
        minus(SpaceExpr::Ball(2), 3),
        SpaceExpr::Sum(vec![minus(SpaceExpr::Ball(1), 2), minus(SpaceExpr::Ball(3), 1)]),
        minus(SpaceExpr::Mobius, 2),
        minus(SpaceExpr::Surface(2), 1),
        minus(SpaceExpr::ProductOfSpheres(vec![1, 2]), 2),
        SpaceExpr::Graph { s: 0, vertices: 2, chords: 3 },
        SpaceExpr::SphereMinusSphere { n: 3, m: 2 },
    ];
    for child in alex_children {
        let id = child.to_string();
        out.push(Fixture::spaces("alex", id, child.clone(), SpaceExpr::alexandroff(child), SpaceExpr::Point));
    }
    out.push(Fixture::spaces("rp2", "point".into(), SpaceExpr::Mobius, SpaceExpr::Projective2, SpaceExpr::Point));
    out.push(Fixture::spaces(
        "rp2",
        "line".into(),
        SpaceExpr::BallMinusSphere { n: 2, m: 1 },
        SpaceExpr::Projective2,
        SpaceExpr::Sphere(1),
    ));
    out.push(Fixture::new(
        "klein",
        "core".into(),
        Piece::Stated { label: "klein_open minus its second circle", kpair: KPair::from_indexed(GroupExpr::free(1, 1)) },
        Piece::Space(SpaceExpr::KleinOpen),
        Piece::Space(SpaceExpr::Sphere(1)),
    ));
    let families: [&[u64]; 5] = [&[1], &[2], &[1, 2], &[1, 1, 1], &[2, 3, 4]];
    for dims in families {
        let arms = sum_or_single(dims.iter().map(|&k| SpaceExpr::Euclid(k)).collect());
        out.push(Fixture::spaces("wedge", format!("dims={}", list(dims)), arms, SpaceExpr::WedgeOfSpheres(dims.to_vec()), SpaceExpr::Point));
        if dims.len() >= 2 {
            let last = dims.len() - 1;
            let links = dims
                .iter()
                .enumerate()
                .map(|(j, &k)| minus(SpaceExpr::Sphere(k), if j == 0 || j == last { 1 } else { 2 }))
                .collect();
            out.push(Fixture::spaces(
                "chain",
                format!("dims={}", list(dims)),
                SpaceExpr::Sum(links),
                SpaceExpr::ChainOfSpheres(dims.to_vec()),
                points(last as u64),
            ));
        }
    }
    for (dims, gammas, marks) in IDENTIFIED {
        let pieces = dims
            .iter()
            .zip(marks)
            .map(|(&p, &c)| if c == 0 { SpaceExpr::Sphere(p) } else { minus(SpaceExpr::Sphere(p), c) })
            .collect();
        out.push(Fixture::spaces(
            "identified",
            format!("dims={},gamma={}", list(dims), list(gammas)),
            sum_or_single(pieces),
            SpaceExpr::IdentifiedSpheres { dims: dims.to_vec(), gammas: gammas.to_vec() },
            points(gammas.len() as u64),
        ));
    }
    out
}

/// Runs the catalogue, optionally restricted to one family.
pub fn catalogue_consistency(ev: &Evaluator, family: Option<&str>) -> CatalogueReport {
    let results = catalogue()
        .iter()
        .filter(|f| family.is_none_or(|fam| f.family == fam))
        .map(|f| f.check(ev))
        .collect();
    CatalogueReport { results }
}

/// Outcome of running the catalogue under one perturbed rule exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantOutcome {
    pub mutation: Mutation,
    /// Rule outputs actually changed across the catalogue; 0 means every
    /// occurrence of the exponent was already 0 and could not go lower.
    pub applications: usize,
    pub failing_fixtures: Vec<String>,
}

impl MutantOutcome {
    pub fn killed(&self) -> bool {
        !self.failing_fixtures.is_empty()
    }
}

/// Every single-exponent ±1 perturbation of every rule that has exponents.
pub fn all_mutations() -> Vec<Mutation> {
    let mut out = Vec::new();
    for rule in Rule::ALL.into_iter().filter(Rule::has_exponents) {
        for exponent in [Exponent::Same, Exponent::Next] {
            for delta in [1, -1] {
                out.push(Mutation { rule, exponent, delta });
            }
        }
    }
    out
}

pub fn mutation_sensitivity() -> Vec<MutantOutcome> {
    let fixtures = catalogue();
    all_mutations()
        .into_iter()
        .map(|m| {
            let ev = Evaluator::with_mutation(m);
            let failing_fixtures = fixtures.iter().map(|f| f.check(&ev)).filter(|r| !r.passed).map(|r| r.id).collect();
            MutantOutcome { mutation: m, applications: ev.mutation_applications(), failing_fixtures }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hx(entries: [(u64, u64); 6]) -> Hexagon {
        Hexagon(entries.map(|(a, b)| GroupExpr::free(a, b)))
    }

    #[test]
    fn rank_check_examples() {
        let ball = hx([(0, 2), (1, 0), (3, 0), (2, 0), (0, 1), (0, 3)]);
        assert!(ball.rank_check());
        assert!(Hexagon([GroupExpr::ZERO; 6]).rank_check());
        assert!(!hx([(1, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, 0)]).rank_check());
    }

    #[test]
    fn mod2_atoms_carry_no_rank() {
        let mut h = Hexagon([GroupExpr::ZERO; 6]);
        h.0[0] = GroupExpr::new(0, 0, 3, 1);
        assert!(h.rank_check());
    }

    #[test]
    fn full_catalogue_passes() {
        let report = catalogue_consistency(&Evaluator::new(), None);
        let failures: Vec<_> = report.failures().collect();
        assert!(failures.is_empty(), "{failures:?}");
    }

    #[test]
    fn ball_family_has_nine_passes() {
        let report = catalogue_consistency(&Evaluator::new(), Some("ball"));
        assert_eq!(report.results.len(), 9);
        assert!(report.all_passed());
    }

    #[test]
    fn corrupted_ball_rule_fails() {
        let ev = Evaluator::with_mutation(Mutation { rule: Rule::BallMinusPoints, exponent: Exponent::Next, delta: 1 });
        let report = catalogue_consistency(&ev, Some("ball"));
        assert_eq!(report.failures().count(), 9);
    }

    #[test]
    fn every_point_removal_base_has_a_fixture() {
        let bases = [
            SpaceExpr::Ball(1),
            SpaceExpr::Sphere(1),
            SpaceExpr::Euclid(1),
            SpaceExpr::ProductOfSpheres(vec![1]),
            SpaceExpr::Surface(1),
            SpaceExpr::Mobius,
        ];
        let open_kinds: Vec<&str> = catalogue()
            .iter()
            .filter_map(|f| match &f.open {
                Piece::Space(SpaceExpr::MinusPoints { base, .. }) => Some(base.kind()),
                _ => None,
            })
            .collect();
        for b in bases {
            assert!(b.admits_point_removal());
            assert!(open_kinds.contains(&b.kind()), "no fixture removes points from {}", b.kind());
        }
    }

    #[test]
    fn every_applicable_mutation_is_detected() {
        let outcomes = mutation_sensitivity();
        assert_eq!(outcomes.len(), 23 * 4);
        for o in &outcomes {
            assert!(o.applications == 0 || o.killed(), "undetected {}", o.mutation);
        }
        // raising an exponent is always possible, so every rule is exercised
        for o in outcomes.iter().filter(|o| o.mutation.delta > 0) {
            assert!(o.applications > 0, "{} never applied", o.mutation);
        }
    }

    #[test]
    fn fixture_ids_are_unique() {
        let mut ids: Vec<String> = catalogue().into_iter().map(|f| f.id).collect();
        let n = ids.len();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }

    #[test]
    fn text_report_mentions_rank_only() {
        let text = catalogue_consistency(&Evaluator::new(), Some("mobius")).render_text();
        assert!(text.contains("3/3"));
        assert!(text.contains("ranks only"));
    }
}
