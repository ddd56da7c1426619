//! Space descriptions built from a fixed set of constructors.
//!
//! [`canonical`] renders the concrete syntax accepted by [`crate::dsl::parse`];
//! the two are inverse on valid trees.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceExpr {
    Point,
    /// A discrete space with `k` points.
    FiniteSet(u64),
    /// Closed unit ball of dimension `n`.
    Ball(u64),
    /// Euclidean space `R^n`.
    Euclid(u64),
    Sphere(u64),
    ProductOfSpheres(Vec<u64>),
    Sum(Vec<SpaceExpr>),
    /// One-point compactification.
    Alexandroff(Box<SpaceExpr>),
    /// `base` with `k` distinct points removed.
    MinusPoints { base: Box<SpaceExpr>, k: u64 },
    /// `s` counts the compact connected components; `vertices`/`chords` are `r0`/`r1`.
    Graph { s: u64, vertices: u64, chords: u64 },
    /// A closed ball of dimension `n` with a compact graph removed; here `s`
    /// counts all connected components of the (compact) graph.
    BallMinusGraph { n: u64, s: u64, vertices: u64, chords: u64 },
    /// Orientable closed surface of genus `g`.
    Surface(u64),
    Mobius,
    /// Klein bottle with its core circle removed.
    KleinOpen,
    /// Real projective plane.
    Projective2,
    /// Spheres joined at a single common point.
    WedgeOfSpheres(Vec<u64>),
    /// Spheres joined in a chain, each glued at one point to the next.
    ChainOfSpheres(Vec<u64>),
    /// Disjoint spheres with finitely many classes of points identified;
    /// `gammas` are the class sizes (the classes are pairwise disjoint).
    IdentifiedSpheres { dims: Vec<u64>, gammas: Vec<u64> },
    SphereMinusSphere { n: u64, m: u64 },
    BallMinusSphere { n: u64, m: u64 },
}

impl SpaceExpr {
    pub fn minus_points(base: SpaceExpr, k: u64) -> SpaceExpr {
        SpaceExpr::MinusPoints { base: Box::new(base), k }
    }

    pub fn alexandroff(child: SpaceExpr) -> SpaceExpr {
        SpaceExpr::Alexandroff(Box::new(child))
    }

    /// Short name of the constructor, as used in violation paths.
    pub fn kind(&self) -> &'static str {
        match self {
            SpaceExpr::Point => "point",
            SpaceExpr::FiniteSet(_) => "points",
            SpaceExpr::Ball(_) => "ball",
            SpaceExpr::Euclid(_) => "euclid",
            SpaceExpr::Sphere(_) => "sphere",
            SpaceExpr::ProductOfSpheres(_) => "spheres",
            SpaceExpr::Sum(_) => "sum",
            SpaceExpr::Alexandroff(_) => "alex",
            SpaceExpr::MinusPoints { .. } => "minus_points",
            SpaceExpr::Graph { .. } => "graph",
            SpaceExpr::BallMinusGraph { .. } => "ball_minus_graph",
            SpaceExpr::Surface(_) => "surface",
            SpaceExpr::Mobius => "mobius",
            SpaceExpr::KleinOpen => "klein_open",
            SpaceExpr::Projective2 => "rp2",
            SpaceExpr::WedgeOfSpheres(_) => "wedge",
            SpaceExpr::ChainOfSpheres(_) => "chain",
            SpaceExpr::IdentifiedSpheres { .. } => "identify_spheres",
            SpaceExpr::SphereMinusSphere { .. } => "sphere_minus_sphere",
            SpaceExpr::BallMinusSphere { .. } => "ball_minus_sphere",
        }
    }

    /// Bases for which point removal has a closed form.
    pub fn admits_point_removal(&self) -> bool {
        matches!(
            self,
            SpaceExpr::Ball(_)
                | SpaceExpr::Sphere(_)
                | SpaceExpr::Euclid(_)
                | SpaceExpr::ProductOfSpheres(_)
                | SpaceExpr::Surface(_)
                | SpaceExpr::Mobius
        )
    }

    /// Number of nodes in the tree (a `MinusPoints` and its base count as one node).
    pub fn node_count(&self) -> usize {
        match self {
            SpaceExpr::Sum(children) => 1 + children.iter().map(SpaceExpr::node_count).sum::<usize>(),
            SpaceExpr::Alexandroff(child) => 1 + child.node_count(),
            _ => 1,
        }
    }
}

impl fmt::Display for SpaceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&canonical(self))
    }
}

/// A broken constraint at a node, addressed by a path like `sum[1]/ball`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub node: String,
    pub constraint: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.node, self.constraint)
    }
}

/// Checks every node's invariants. Never fails; an empty list means valid.
pub fn validate(x: &SpaceExpr) -> Vec<Violation> {
    let mut out = Vec::new();
    validate_at(x, x.kind().to_string(), &mut out);
    out
}

fn validate_at(x: &SpaceExpr, path: String, out: &mut Vec<Violation>) {
    let start = out.len();
    let mut local: Vec<String> = Vec::new();
    let mut bad = |constraint: String| local.push(constraint);
    let dim = |n: u64, bad: &mut dyn FnMut(String)| {
        if n < 1 {
            bad("dimension must be ≥ 1".to_string());
        }
    };
    let dims = |ds: &[u64], bad: &mut dyn FnMut(String)| {
        if ds.is_empty() {
            bad("dimension list must be nonempty".to_string());
        }
        if ds.iter().any(|&d| d < 1) {
            bad("dimension must be ≥ 1".to_string());
        }
    };
    match x {
        SpaceExpr::Point | SpaceExpr::Mobius | SpaceExpr::KleinOpen | SpaceExpr::Projective2 => {}
        SpaceExpr::FiniteSet(k) => {
            if *k < 1 {
                bad("point count must be ≥ 1".to_string());
            }
        }
        SpaceExpr::Ball(n) | SpaceExpr::Euclid(n) | SpaceExpr::Sphere(n) => dim(*n, &mut bad),
        SpaceExpr::ProductOfSpheres(ds) | SpaceExpr::WedgeOfSpheres(ds) | SpaceExpr::ChainOfSpheres(ds) => {
            dims(ds, &mut bad)
        }
        SpaceExpr::Surface(g) => {
            if *g < 1 {
                bad("genus must be ≥ 1".to_string());
            }
        }
        SpaceExpr::Graph { s, vertices, chords } => {
            if *vertices < 1 {
                bad("vertex count must be ≥ 1".to_string());
            }
            if (*s as i128) + (*chords as i128) - (*vertices as i128) < 0 {
                bad("s + r1 − r0 ≥ 0 violated".to_string());
            }
        }
        SpaceExpr::BallMinusGraph { n, s, vertices, chords } => {
            dim(*n, &mut bad);
            if *s < 1 {
                bad("component count must be ≥ 1".to_string());
            }
            if *vertices < 1 {
                bad("vertex count must be ≥ 1".to_string());
            }
            if (*s as i128) + (*chords as i128) - (*vertices as i128) < 0 {
                bad("s − r0 + r1 ≥ 0 violated".to_string());
            }
        }
        SpaceExpr::IdentifiedSpheres { dims: ds, gammas } => {
            dims(ds, &mut bad);
            if gammas.is_empty() {
                bad("identification class list must be nonempty".to_string());
            }
            if gammas.iter().any(|&g| g < 1) {
                bad("identification classes must be nonempty".to_string());
            }
            let total: i128 = gammas.iter().map(|&g| g as i128).sum();
            if total - ds.len() as i128 - gammas.len() as i128 + 1 < 0 {
                bad("total_marked − #dims − #gammas + 1 ≥ 0 violated".to_string());
            }
        }
        SpaceExpr::SphereMinusSphere { n, m } | SpaceExpr::BallMinusSphere { n, m } => {
            if !(1 <= *m && m < n) {
                bad("requires 1 ≤ m < n".to_string());
            }
        }
        SpaceExpr::Sum(children) => {
            if children.len() < 2 {
                bad("sum needs at least 2 summands".to_string());
            }
            for (i, c) in children.iter().enumerate() {
                validate_at(c, format!("{path}[{i}]/{}", c.kind()), out);
            }
        }
        SpaceExpr::Alexandroff(child) => validate_at(child, format!("{path}/{}", child.kind()), out),
        SpaceExpr::MinusPoints { base, k } => {
            if *k < 1 {
                bad("removed point count must be ≥ 1".to_string());
            }
            if !base.admits_point_removal() {
                bad(format!("point removal is not supported on `{}`", base.kind()));
            } else {
                validate_at(base, format!("{path}/{}", base.kind()), out);
            }
        }
    }
    let own = local.into_iter().map(|constraint| Violation { node: path.clone(), constraint });
    out.splice(start..start, own);
}

fn join(ds: &[u64]) -> String {
    ds.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// Deterministic rendering in the DSL's concrete syntax.
pub fn canonical(x: &SpaceExpr) -> String {
    match x {
        SpaceExpr::Point => "point".into(),
        SpaceExpr::FiniteSet(k) => format!("points({k})"),
        SpaceExpr::Ball(n) => format!("ball({n})"),
        SpaceExpr::Euclid(n) => format!("euclid({n})"),
        SpaceExpr::Sphere(n) => format!("sphere({n})"),
        SpaceExpr::ProductOfSpheres(ds) => format!("spheres({})", join(ds)),
        SpaceExpr::Sum(children) => {
            let inner: Vec<String> = children.iter().map(canonical).collect();
            format!("sum({})", inner.join(","))
        }
        SpaceExpr::Alexandroff(child) => format!("alex({})", canonical(child)),
        SpaceExpr::MinusPoints { base, k } => format!("{}\\{k}", canonical(base)),
        SpaceExpr::Graph { s, vertices, chords } => format!("graph(s={s},v={vertices},e={chords})"),
        SpaceExpr::BallMinusGraph { n, s, vertices, chords } => {
            format!("ball_minus_graph(n={n},s={s},v={vertices},e={chords})")
        }
        SpaceExpr::Surface(g) => format!("surface({g})"),
        SpaceExpr::Mobius => "mobius".into(),
        SpaceExpr::KleinOpen => "klein_open".into(),
        SpaceExpr::Projective2 => "rp2".into(),
        SpaceExpr::WedgeOfSpheres(ds) => format!("wedge({})", join(ds)),
        SpaceExpr::ChainOfSpheres(ds) => format!("chain({})", join(ds)),
        SpaceExpr::IdentifiedSpheres { dims, gammas } => {
            format!("identify_spheres(dims=[{}],gamma=[{}])", join(dims), join(gammas))
        }
        SpaceExpr::SphereMinusSphere { n, m } => format!("sphere_minus_sphere({n},{m})"),
        SpaceExpr::BallMinusSphere { n, m } => format!("ball_minus_sphere({n},{m})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        let v = validate(&SpaceExpr::Ball(0));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].constraint, "dimension must be ≥ 1");

        let v = validate(&SpaceExpr::Graph { s: 1, vertices: 3, chords: 1 });
        assert_eq!(v.len(), 1);
        assert!(v[0].constraint.contains("s + r1 − r0 ≥ 0"));

        assert!(validate(&SpaceExpr::Sphere(2)).is_empty());
    }

    #[test]
    fn validate_reports_nested_paths() {
        let x = SpaceExpr::Sum(vec![SpaceExpr::Point, SpaceExpr::alexandroff(SpaceExpr::Euclid(0))]);
        let v = validate(&x);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].node, "sum[1]/alex/euclid");
    }

    #[test]
    fn point_removal_restricted_to_known_bases() {
        assert!(validate(&SpaceExpr::minus_points(SpaceExpr::Ball(2), 3)).is_empty());
        let v = validate(&SpaceExpr::minus_points(SpaceExpr::Projective2, 1));
        assert!(v[0].constraint.contains("not supported"));
        let v = validate(&SpaceExpr::minus_points(SpaceExpr::Sphere(1), 0));
        assert!(v[0].constraint.contains("≥ 1"));
        let nested = SpaceExpr::minus_points(SpaceExpr::minus_points(SpaceExpr::Ball(2), 1), 1);
        assert!(!validate(&nested).is_empty());
    }

    #[test]
    fn identified_spheres_constraints() {
        let ok = SpaceExpr::IdentifiedSpheres { dims: vec![1, 2], gammas: vec![2] };
        assert!(validate(&ok).is_empty());
        // three spheres, one class of two points: cannot be connected
        let bad = SpaceExpr::IdentifiedSpheres { dims: vec![1, 1, 1], gammas: vec![2] };
        assert_eq!(validate(&bad).len(), 1);
        let bad = SpaceExpr::IdentifiedSpheres { dims: vec![1], gammas: vec![0, 2] };
        assert!(!validate(&bad).is_empty());
    }

    #[test]
    fn sphere_pair_bounds() {
        assert!(validate(&SpaceExpr::SphereMinusSphere { n: 3, m: 1 }).is_empty());
        assert!(!validate(&SpaceExpr::SphereMinusSphere { n: 2, m: 2 }).is_empty());
        assert!(!validate(&SpaceExpr::BallMinusSphere { n: 2, m: 0 }).is_empty());
    }

    #[test]
    fn sum_needs_two_children() {
        assert!(!validate(&SpaceExpr::Sum(vec![SpaceExpr::Point])).is_empty());
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical(&SpaceExpr::minus_points(SpaceExpr::Ball(3), 2)), "ball(3)\\2");
        assert_eq!(
            canonical(&SpaceExpr::Sum(vec![SpaceExpr::Sphere(1), SpaceExpr::Sphere(2)])),
            "sum(sphere(1),sphere(2))"
        );
        assert_eq!(canonical(&SpaceExpr::alexandroff(SpaceExpr::Euclid(2))), "alex(euclid(2))");
        assert_eq!(
            canonical(&SpaceExpr::IdentifiedSpheres { dims: vec![1, 2], gammas: vec![2, 3] }),
            "identify_spheres(dims=[1,2],gamma=[2,3])"
        );
    }
}
