//! Reference implementations shared by the test targets.
#![allow(dead_code)]

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use netregress::dsl::EdgeContext;
use netregress::graph::{Network, NodeId, DIRECTED_TRIAD_NAMES};

pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Network {
    let mut edges = Vec::new();
    for u in 0..n as NodeId {
        for v in 0..n as NodeId {
            if u != v && rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    Network::from_edges(n, true, &edges).unwrap()
}

/// One arc set per class, confirmed against an external census implementation.
pub const TRIAD_REPRESENTATIVES: [(&str, &[(usize, usize)]); 16] = [
    ("003", &[]),
    ("012", &[(0, 1)]),
    ("102", &[(0, 1), (1, 0)]),
    ("021D", &[(1, 0), (1, 2)]),
    ("021U", &[(0, 1), (2, 1)]),
    ("021C", &[(0, 1), (1, 2)]),
    ("111D", &[(0, 1), (1, 0), (2, 1)]),
    ("111U", &[(0, 1), (1, 0), (1, 2)]),
    ("030T", &[(0, 1), (1, 2), (0, 2)]),
    ("030C", &[(0, 1), (1, 2), (2, 0)]),
    ("201", &[(0, 1), (1, 0), (1, 2), (2, 1)]),
    ("120D", &[(1, 0), (1, 2), (0, 2), (2, 0)]),
    ("120U", &[(0, 1), (2, 1), (0, 2), (2, 0)]),
    ("120C", &[(0, 1), (1, 2), (0, 2), (2, 0)]),
    ("210", &[(0, 1), (1, 0), (1, 2), (2, 1), (0, 2)]),
    ("300", &[(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)]),
];

pub const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

pub fn arcs(net: &Network, t: [NodeId; 3]) -> HashSet<(usize, usize)> {
    let mut s = HashSet::new();
    for a in 0..3 {
        for b in 0..3 {
            if a != b && net.has_edge(t[a], t[b]) {
                s.insert((a, b));
            }
        }
    }
    s
}

pub fn triad_class(found: &HashSet<(usize, usize)>) -> &'static str {
    for (name, rep) in TRIAD_REPRESENTATIVES {
        if rep.len() != found.len() {
            continue;
        }
        for p in PERMS {
            let mapped: HashSet<_> = rep.iter().map(|&(a, b)| (p[a], p[b])).collect();
            if &mapped == found {
                return name;
            }
        }
    }
    unreachable!("every arc set on three nodes matches a class")
}

pub fn brute_force_census(net: &Network) -> Vec<u64> {
    let n = net.node_count() as NodeId;
    let mut counts = vec![0u64; 16];
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let name = triad_class(&arcs(net, [a, b, c]));
                counts[DIRECTED_TRIAD_NAMES.iter().position(|&x| x == name).unwrap()] += 1;
            }
        }
    }
    counts
}

/// Greedy north-west-corner transport between two equal-mass histograms on
/// a line, moving mass at cost `|i - j|` per unit.
pub fn transport_cost(a: &[f64], b: &[f64]) -> f64 {
    let mut supply = a.to_vec();
    let mut demand = b.to_vec();
    let (mut i, mut j, mut cost) = (0, 0, 0.0);
    while i < supply.len() && j < demand.len() {
        let moved = supply[i].min(demand[j]);
        cost += moved * (i as f64 - j as f64).abs();
        supply[i] -= moved;
        demand[j] -= moved;
        if supply[i] <= demand[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    cost
}

pub fn random_histogram(rng: &mut ChaCha8Rng, bins: usize) -> Vec<f64> {
    let sparse = rng.gen_bool(0.3);
    let mut h: Vec<f64> = (0..bins)
        .map(|_| if sparse && rng.gen_bool(0.7) { 0.0 } else { rng.gen::<f64>() })
        .collect();
    if h.iter().all(|&x| x == 0.0) {
        h[0] = 1.0;
    }
    let total: f64 = h.iter().sum();
    h.iter_mut().for_each(|x| *x /= total);
    h
}

/// Solves `(I - alpha * P^T) x = beta` by Gaussian elimination with partial pivoting.
pub fn dense_pagerank(net: &Network, alpha: f64, reverse: bool) -> Vec<f64> {
    let n = net.node_count();
    let beta = (1.0 - alpha) / n as f64;
    let mut arcs = Vec::new();
    for &(u, v) in net.edges() {
        let (u, v) = (u as usize, v as usize);
        let mut push = |a: usize, b: usize| arcs.push(if reverse { (b, a) } else { (a, b) });
        push(u, v);
        if !net.is_directed() {
            push(v, u);
        }
    }
    let mut out = vec![0usize; n];
    for &(a, _) in &arcs {
        out[a] += 1;
    }
    let mut m = vec![vec![0.0; n + 1]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
        row[n] = beta;
    }
    for &(a, b) in &arcs {
        m[b][a] -= alpha / out[a] as f64;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs())).unwrap();
        m.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    for c in col..=n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    (0..n).map(|i| m[i][n] / m[i][i]).collect()
}

/// A context a growing network can actually present: integer ids and
/// degrees, distances in 1..=10, xi in [0, 1].
pub fn valid_context<R: Rng>(rng: &mut R) -> EdgeContext {
    let n = 200.0;
    let i = rng.gen_range(0..200) as f64;
    let j = loop {
        let j = rng.gen_range(0..200) as f64;
        if j != i {
            break j;
        }
    };
    let deg = |rng: &mut R| rng.gen_range(0..n as u32) as f64;
    let dist = |rng: &mut R| rng.gen_range(1..=10) as f64;
    EdgeContext {
        i,
        j,
        k_i: deg(rng),
        k_j: deg(rng),
        kin_i: deg(rng),
        kin_j: deg(rng),
        kout_i: deg(rng),
        kout_j: deg(rng),
        d: dist(rng),
        dd: dist(rng),
        dr: dist(rng),
        xi: rng.gen::<f64>(),
    }
}

