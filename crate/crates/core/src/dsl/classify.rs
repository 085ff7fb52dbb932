//! Behavioural classification of generators on a fixed probe grid.
//!
//! Symbolic equivalence is undecidable in general, so generator families are
//! recognised by how the weight responds to each variable on a deterministic
//! set of probe contexts.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EdgeContext, Expr, GeneratorTree, Var};

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Ignores every variable (Erdos-Renyi).
    Constant,
    /// Reads only degrees and never decreases as any degree grows (PA).
    Degree,
    /// Degree family growing faster than any low-order polynomial (PA', k^k).
    DegreeSuperPoly,
    /// Reads only distances, non-decreasing in distance.
    Distance,
    /// Reads only distances, non-increasing in distance.
    InverseDistance,
    /// Reads only node identifiers.
    Identifier,
    /// A root-level delta switching between two families.
    Switch {
        threshold: f64,
        before: Box<Family>,
        after: Box<Family>,
    },
    Other,
}

impl Family {
    pub fn is_degree(&self) -> bool {
        matches!(self, Family::Degree | Family::DegreeSuperPoly)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Constant => f.write_str("ER"),
            Family::Degree => f.write_str("PA"),
            Family::DegreeSuperPoly => f.write_str("PA'"),
            Family::Distance => f.write_str("d"),
            Family::InverseDistance => f.write_str("1/d"),
            Family::Identifier => f.write_str("ID"),
            Family::Switch {
                threshold,
                before,
                after,
            } => write!(f, "delta_{threshold}({before}, {after})"),
            Family::Other => f.write_str("other"),
        }
    }
}

const PROBES: usize = 400;
const RESAMPLES: usize = 4;
/// Share of probes on which a tree may deviate from its family's behaviour.
/// Evolved trees often carry rarely taken branches (`(=0 j ...)` fires for
/// one node in hundreds) that leave the generated networks unchanged.
const TOLERANCE: f64 = 0.1;
const DEGREE_LADDER: [f64; 12] = [0.0, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 15.0, 20.0, 30.0, 40.0];
const DISTANCE_LADDER: [f64; 7] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 10.0];

fn draw(v: Var, rng: &mut ChaCha8Rng) -> f64 {
    match v {
        Var::I | Var::J => rng.gen_range(0..200) as f64,
        Var::D | Var::Dd | Var::Dr => DISTANCE_LADDER[rng.gen_range(0..DISTANCE_LADDER.len())],
        Var::Xi => rng.gen_range(0.0..=1.0),
        _ => rng.gen_range(0..=40) as f64,
    }
}

/// Deterministic probe contexts with every variable drawn independently:
/// identifiers in 0..200, degrees in 0..=40, distances in 1..=6 or the
/// sentinel 10, edge ratio in [0, 1].
pub fn probe_contexts() -> Vec<EdgeContext> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_7ab1e);
    (0..PROBES)
        .map(|_| {
            let mut c = EdgeContext::default();
            for v in Var::ALL {
                c.set(v, draw(v, &mut rng));
            }
            c
        })
        .collect()
}

fn same(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Share of (probe, resample) pairs where redrawing `v` changes the weight.
fn sensitivity(tree: &GeneratorTree, probes: &[EdgeContext], v: Var) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(v as u64);
    let mut changed = 0;
    for base in probes {
        let w0 = tree.evaluate(base);
        for _ in 0..RESAMPLES {
            let mut c = *base;
            c.set(v, draw(v, &mut rng));
            if !same(tree.evaluate(&c), w0) {
                changed += 1;
            }
        }
    }
    changed as f64 / (probes.len() * RESAMPLES) as f64
}

/// +1 when non-decreasing along every ladder on all but a tolerated share of
/// probes, -1 when non-increasing likewise, 0 otherwise.
fn monotone_direction(tree: &GeneratorTree, probes: &[EdgeContext], vars: &[Var], ladder: &[f64]) -> i8 {
    let (mut up_bad, mut down_bad, mut rises, mut falls) = (0, 0, false, false);
    for base in probes {
        let (mut up, mut down) = (true, true);
        for &v in vars {
            let ws: Vec<f64> = ladder
                .iter()
                .map(|&x| {
                    let mut c = *base;
                    c.set(v, x);
                    tree.evaluate(&c)
                })
                .collect();
            for w in ws.windows(2) {
                if w[1] < w[0] && !same(w[0], w[1]) {
                    up = false;
                    falls = true;
                }
                if w[1] > w[0] && !same(w[0], w[1]) {
                    down = false;
                    rises = true;
                }
            }
        }
        up_bad += usize::from(!up);
        down_bad += usize::from(!down);
    }
    let allowed = (TOLERANCE * probes.len() as f64) as usize;
    if rises && up_bad <= allowed {
        1
    } else if falls && down_bad <= allowed {
        -1
    } else {
        0
    }
}

fn super_polynomial(tree: &GeneratorTree, probes: &[EdgeContext], vars: &[Var]) -> bool {
    // k^3 grows 27-fold from k=10 to k=30, k^k by ~1e34
    let fast = probes
        .iter()
        .filter(|base| {
            vars.iter().any(|&v| {
                let at = |k: f64| {
                    let mut c = **base;
                    c.set(v, k);
                    tree.evaluate(&c)
                };
                let (lo, hi) = (at(10.0), at(30.0));
                lo > 0.0 && hi / lo > 1e4
            })
        })
        .count();
    fast * 2 > probes.len()
}

fn classify_behaviour(tree: &GeneratorTree) -> Family {
    let probes = probe_contexts();
    let deps: Vec<Var> = Var::ALL
        .into_iter()
        .filter(|&v| sensitivity(tree, &probes, v) > TOLERANCE)
        .collect();
    if deps.is_empty() {
        return Family::Constant;
    }
    if deps.iter().all(|v| v.is_degree()) {
        return match monotone_direction(tree, &probes, &deps, &DEGREE_LADDER) {
            1 if super_polynomial(tree, &probes, &deps) => Family::DegreeSuperPoly,
            1 => Family::Degree,
            _ => Family::Other,
        };
    }
    if deps.iter().all(|v| v.is_distance()) {
        return match monotone_direction(tree, &probes, &deps, &DISTANCE_LADDER) {
            1 => Family::Distance,
            -1 => Family::InverseDistance,
            _ => Family::Other,
        };
    }
    if deps.iter().all(|v| matches!(v, Var::I | Var::J)) {
        return Family::Identifier;
    }
    Family::Other
}

/// Classifies a (preferably simplified) generator. A delta at the root is
/// reported as a [`Family::Switch`] of its two branches.
pub fn classify(tree: &GeneratorTree) -> Family {
    match tree.root() {
        Expr::Delta {
            threshold,
            before,
            after,
        } => Family::Switch {
            threshold: *threshold,
            before: Box::new(classify(&GeneratorTree::new((**before).clone()))),
            after: Box::new(classify(&GeneratorTree::new((**after).clone()))),
        },
        _ => classify_behaviour(tree),
    }
}

pub fn contains_delta(tree: &GeneratorTree) -> bool {
    !delta_thresholds(tree).is_empty()
}

/// Switch thresholds of every delta node, in preorder.
pub fn delta_thresholds(tree: &GeneratorTree) -> Vec<f64> {
    fn walk(e: &Expr, out: &mut Vec<f64>) {
        if let Expr::Delta { threshold, .. } = e {
            out.push(*threshold);
        }
        for c in e.children() {
            walk(c, out);
        }
    }
    let mut out = Vec::new();
    walk(tree.root(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(s: &str) -> Family {
        classify(&GeneratorTree::parse(s).unwrap())
    }

    #[test]
    fn canonical_families() {
        assert_eq!(fam("1"), Family::Constant);
        assert_eq!(fam("(* 0 d)"), Family::Constant);
        assert_eq!(fam("k_i"), Family::Degree);
        assert_eq!(fam("(+ k_i (* 2 k_j))"), Family::Degree);
        assert_eq!(fam("(pow k k)"), Family::DegreeSuperPoly);
        assert_eq!(fam("d"), Family::Distance);
        assert_eq!(fam("(exp (- 4 (* 2 d)))"), Family::InverseDistance);
        assert_eq!(fam("(max i j)"), Family::Identifier);
        assert_eq!(fam("(- 10 k_i)"), Family::Other);
        assert_eq!(fam("(+ k_i d)"), Family::Other);
    }

    #[test]
    fn rarely_taken_branches_are_tolerated() {
        assert_eq!(fam("(=0 j (max i 67.2) k_j)"), Family::Degree);
        assert_eq!(fam("(=0 i 0 d)"), Family::Distance);
        assert_eq!(fam("(> j 100 k_i 1)"), Family::Other);
    }

    #[test]
    fn switch_family() {
        match fam("(delta 0.5 (pow k k) k)") {
            Family::Switch {
                threshold,
                before,
                after,
            } => {
                assert_eq!(threshold, 0.5);
                assert_eq!(*before, Family::DegreeSuperPoly);
                assert_eq!(*after, Family::Degree);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(fam("(> xi 0.5 k 1)"), Family::Other);
    }

    #[test]
    fn delta_detection() {
        let t = GeneratorTree::parse("(* k_i (delta 0.46 (pow k k) 6))").unwrap();
        assert_eq!(delta_thresholds(&t), vec![0.46]);
        assert!(!contains_delta(&GeneratorTree::parse("(> xi 0.5 k 1)").unwrap()));
    }
}
