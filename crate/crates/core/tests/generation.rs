use std::collections::HashSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use netregress::dsl::GeneratorTree;
use netregress::graph::{bfs_distances, DistanceKind, Network, NodeId, HEURISTIC_INIT};
use netregress::netgen::{erdos_renyi, generate, generate_from, generate_observed, selection_probabilities, GenerationConfig};

fn tree(text: &str) -> GeneratorTree {
    GeneratorTree::parse(text).unwrap()
}

/// Pearson statistic and its upper-tail p-value.
fn chi_square(observed: &[f64], expected: &[f64]) -> f64 {
    let stat: f64 = observed.iter().zip(expected).map(|(o, e)| (o - e).powi(2) / e).sum();
    1.0 - ChiSquared::new((observed.len() - 1) as f64).unwrap().cdf(stat)
}

fn first_edge(gen: &GeneratorTree, cfg: &GenerationConfig, seed: u64) -> (NodeId, NodeId) {
    let net = generate(gen, &cfg.clone().with_seed(seed)).unwrap().network;
    net.edges()[0]
}

#[test]
fn constant_generator_selects_uniformly() {
    let one = tree("1");
    let n = 8;
    let pairs = n * (n - 1) / 2;
    // full candidate set, then the default small sample
    for ratio in [1.0, 0.0006] {
        let cfg = GenerationConfig {
            sampling_ratio: ratio,
            ..GenerationConfig::new(n, 1, false)
        };
        let mut counts = vec![0.0; n * n];
        for seed in 0..10_000 {
            let (u, v) = first_edge(&one, &cfg, seed);
            counts[u.min(v) as usize * n + u.max(v) as usize] += 1.0;
        }
        let observed: Vec<f64> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .map(|(u, v)| counts[u * n + v])
            .collect();
        let expected = vec![10_000.0 / pairs as f64; pairs];
        let p = chi_square(&observed, &expected);
        assert!(p > 0.001, "sampling ratio {ratio}: p = {p}");
    }
}

#[test]
fn selection_is_proportional_to_weight() {
    let gen = tree("(+ i 1)");
    let n = 6;
    let cfg = GenerationConfig {
        sampling_ratio: 1.0,
        ..GenerationConfig::new(n, 1, true)
    };
    let mut counts = vec![0.0; n];
    let draws = 10_000;
    for seed in 0..draws {
        counts[first_edge(&gen, &cfg, seed).0 as usize] += 1.0;
    }
    let total: f64 = (1..=n).map(|x| x as f64).sum();
    let expected: Vec<f64> = (1..=n).map(|x| draws as f64 * x as f64 / total).collect();
    let p = chi_square(&counts, &expected);
    assert!(p > 0.001, "p = {p}");
}

fn degrees(net: &Network) -> Vec<f64> {
    (0..net.node_count() as NodeId).map(|v| net.total_degree(v) as f64).collect()
}

fn ks_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn constant_generator_matches_uniform_random_graphs() {
    let one = tree("1");
    let (n, e, reps) = (200, 1000, 20);
    let mut grown = Vec::new();
    let mut uniform = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for seed in 0..reps {
        let net = generate(&one, &GenerationConfig::new(n, e, false).with_seed(seed)).unwrap().network;
        grown.extend(degrees(&net));
        uniform.extend(degrees(&erdos_renyi(n, e, false, &mut rng).unwrap()));
    }
    let d = ks_statistic(&mut grown, &mut uniform);
    let m = grown.len() as f64;
    // alpha = 0.001 two-sample critical value
    let critical = 1.95 * (2.0 / m).sqrt();
    assert!(d < critical, "KS {d} >= {critical}");
}

#[test]
fn preferential_attachment_grows_hubs() {
    let (pa, er) = (tree("k"), tree("1"));
    let mut wins = 0;
    for seed in 0..30 {
        let cfg = GenerationConfig::new(200, 1000, false).with_seed(seed);
        let max = |t: &GeneratorTree| degrees(&generate(t, &cfg).unwrap().network).into_iter().fold(0.0, f64::max);
        if max(&pa) > max(&er) {
            wins += 1;
        }
    }
    assert!(wins >= 28, "PA beat ER in {wins}/30 runs");
}

#[test]
fn same_seed_same_edges() {
    let gen = tree("(delta 0.5 k (pow k k))");
    for directed in [false, true] {
        let cfg = GenerationConfig::new(60, 300, directed).with_seed(5).with_snapshots(&[0.3, 1.0]);
        let a = generate(&gen, &cfg).unwrap();
        let b = generate(&gen, &cfg).unwrap();
        assert_eq!(a.network.edges(), b.network.edges());
        let c = generate(&gen, &cfg.clone().with_seed(6)).unwrap();
        assert_ne!(a.network.edges(), c.network.edges());
    }
    let d = tree("(/ 1 d)");
    let cfg = GenerationConfig::new(50, 200, false).with_seed(3);
    assert_eq!(generate(&d, &cfg).unwrap().network.edges(), generate(&d, &cfg).unwrap().network.edges());
}

#[test]
fn snapshots_form_a_chain() {
    let cfg = GenerationConfig::new(80, 400, true).with_seed(2).with_snapshots(&[0.25, 0.5, 0.75, 1.0]);
    let r = generate(&tree("(+ kin_j 1)"), &cfg).unwrap();
    let mut previous: HashSet<(NodeId, NodeId)> = HashSet::new();
    for s in &r.snapshots {
        assert_eq!(s.network.edge_count(), (s.xi * 400.0).round() as usize);
        let edges: HashSet<_> = s.network.edges().iter().copied().collect();
        assert!(previous.is_subset(&edges));
        previous = edges;
    }
    assert_eq!(r.snapshots.last().unwrap().network.edges(), r.network.edges());
}

#[test]
fn edge_ratio_only_grows() {
    let cfg = GenerationConfig::new(40, 150, false).with_seed(4);
    let mut seen = Vec::new();
    generate_observed(&[], &tree("(* xi k)"), &cfg, &mut |net, _| seen.push(net.edge_ratio())).unwrap();
    assert_eq!(seen.len(), 150);
    assert!(seen.windows(2).all(|w| w[0] <= w[1]));
    assert!(seen.iter().all(|&x| (0.0..=1.0).contains(&x)));
    assert_eq!(*seen.last().unwrap(), 1.0);
}

#[test]
fn walk_estimates_bound_true_distances() {
    let cfg = GenerationConfig::new(120, 500, false).with_seed(8);
    let mut checked = 0;
    generate_observed(&[], &tree("d"), &cfg, &mut |net, oracle| {
        if net.edge_count() != 500 {
            return;
        }
        let m = oracle.undirected_matrix().expect("d uses walkers");
        for i in 0..120 as NodeId {
            let exact = bfs_distances(net, i, DistanceKind::Undirected);
            for j in 0..120 as NodeId {
                let est = m.get(i, j);
                if i != j && est < HEURISTIC_INIT {
                    assert!(est as u32 >= exact[j as usize], "({i},{j}): {est} < {}", exact[j as usize]);
                    checked += 1;
                }
            }
        }
    })
    .unwrap();
    assert!(checked > 1000);
}

#[test]
fn switching_generator_from_half_grown_network() {
    let half = generate(&tree("k"), &GenerationConfig::new(100, 250, false).with_seed(1))
        .unwrap()
        .network;
    let cfg = GenerationConfig::new(100, 500, false).with_seed(2).with_snapshots(&[0.5, 1.0]);
    let r = generate_from(&half, &tree("(pow k k)"), &cfg).unwrap();
    assert_eq!(r.network.edge_count(), 500);
    assert_eq!(&r.network.edges()[..250], half.edges());
    assert_eq!(r.snapshots[0].network.edges(), half.edges());
}

proptest! {
    #[test]
    fn probabilities_sum_to_one(weights in prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1e6, 0.0f64..1e-300], 1..200)) {
        let p = selection_probabilities(&weights);
        let total: f64 = p.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9, "{}", total);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
    }
}
