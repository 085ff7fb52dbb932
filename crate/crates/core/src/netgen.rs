//! Growing networks from a generator.
//!
//! Each step samples candidate node pairs that are not yet linked, weighs
//! them with the generator and adds one pair chosen in proportion to its
//! weight. The edge ratio `xi = e / E` is the clock the generator sees.

use std::collections::HashSet;

use rand::seq::index;
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dsl::{EdgeContext, GeneratorTree, Var, VarSet};
use crate::graph::{DistanceKind, DistanceMode, DistanceOracle, Network, NodeId, DEFAULT_SENTINEL};
use crate::{Error, Result};

/// Parameters of one generation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub node_count: usize,
    pub target_edge_count: usize,
    pub directed: bool,
    pub sampling_ratio: f64,
    /// Lower bound on the candidate sample size.
    pub sample_floor: usize,
    pub distance_mode: DistanceMode,
    pub rw_steps_per_edge: usize,
    /// Strictly increasing edge ratios in (0, 1]; the last must be 1.0.
    pub snapshot_ratios: Vec<f64>,
    pub sentinel: u32,
    pub seed: u64,
}

impl GenerationConfig {
    pub fn new(node_count: usize, target_edge_count: usize, directed: bool) -> Self {
        Self {
            node_count,
            target_edge_count,
            directed,
            sampling_ratio: 0.0006,
            sample_floor: 2,
            distance_mode: DistanceMode::Heuristic,
            rw_steps_per_edge: 5,
            snapshot_ratios: Vec::new(),
            sentinel: DEFAULT_SENTINEL,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_snapshots(mut self, ratios: &[f64]) -> Self {
        self.snapshot_ratios = ratios.to_vec();
        self
    }

    pub fn with_distance_mode(mut self, mode: DistanceMode) -> Self {
        self.distance_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < 2 {
            return Err(Error::input("generation needs at least two nodes"));
        }
        let capacity = Network::capacity_for(self.node_count, self.directed);
        if self.target_edge_count == 0 || self.target_edge_count > capacity {
            return Err(Error::input(format!(
                "target edge count {} outside 1..={capacity} for {} nodes",
                self.target_edge_count, self.node_count
            )));
        }
        if !(self.sampling_ratio > 0.0 && self.sampling_ratio <= 1.0) {
            return Err(Error::input("sampling ratio must lie in (0, 1]"));
        }
        if self.sample_floor == 0 {
            return Err(Error::input("sample floor must be at least 1"));
        }
        let r = &self.snapshot_ratios;
        if !r.is_empty() {
            if r.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
                return Err(Error::input("snapshot ratios must lie in (0, 1]"));
            }
            if r.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::input("snapshot ratios must be strictly increasing"));
            }
            if *r.last().unwrap() != 1.0 {
                return Err(Error::input("the last snapshot ratio must be 1.0"));
            }
            for &x in r {
                if self.snapshot_edge_count(x) == 0 {
                    return Err(Error::input(format!("snapshot at xi={x} would hold no edges")));
                }
            }
        }
        Ok(())
    }

    /// `round(xi * E)`.
    pub fn snapshot_edge_count(&self, xi: f64) -> usize {
        (xi * self.target_edge_count as f64).round() as usize
    }
}

/// A network as it stood when the edge ratio reached `xi`.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub xi: f64,
    pub network: Network,
}

#[derive(Debug, Clone)]
pub struct GenerationResult {
    pub network: Network,
    /// One entry per requested ratio, in order.
    pub snapshots: Vec<Snapshot>,
    pub seed: u64,
}

impl GenerationResult {
    /// Snapshot networks, or the final network when none were requested.
    pub fn stages(&self) -> Vec<&Network> {
        if self.snapshots.is_empty() {
            vec![&self.network]
        } else {
            self.snapshots.iter().map(|s| &s.network).collect()
        }
    }
}

/// `P_ij = w_ij / sum(w)`, uniform when every weight is zero.
pub fn selection_probabilities(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    if total > 0.0 && total.is_finite() {
        weights.iter().map(|w| w / total).collect()
    } else {
        vec![1.0 / weights.len() as f64; weights.len()]
    }
}

fn select<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return rng.gen_range(0..weights.len());
    }
    let r = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = i;
            if r < acc {
                return i;
            }
        }
    }
    // rounding left r at or above the accumulated total
    last_positive
}

/// Sample size for `available` candidates.
pub fn sample_size(available: usize, sampling_ratio: f64, floor: usize) -> usize {
    let s = (sampling_ratio * available as f64).round() as usize;
    s.max(floor).min(available)
}

fn is_candidate(net: &Network, u: NodeId, v: NodeId) -> bool {
    u != v && !net.has_edge(u, v)
}

fn sample_candidates<R: Rng + ?Sized>(
    net: &Network,
    available: usize,
    size: usize,
    rng: &mut R,
    out: &mut Vec<(NodeId, NodeId)>,
) {
    out.clear();
    let n = net.node_count();
    let ordered = n * (n - 1);
    if 2 * available >= ordered && 4 * size <= available {
        // dense in candidates: rejection sampling stays cheap
        let mut seen = HashSet::with_capacity(size);
        while out.len() < size {
            let u = rng.gen_range(0..n) as NodeId;
            let v = rng.gen_range(0..n) as NodeId;
            if is_candidate(net, u, v) && seen.insert((u, v)) {
                out.push((u, v));
            }
        }
    } else {
        let mut all = Vec::with_capacity(available);
        for u in 0..n as NodeId {
            for v in 0..n as NodeId {
                if is_candidate(net, u, v) {
                    all.push((u, v));
                }
            }
        }
        debug_assert_eq!(all.len(), available);
        out.extend(index::sample(rng, all.len(), size).into_iter().map(|k| all[k]));
    }
}

/// Ordered candidate pairs left in `net`.
fn available_candidates(net: &Network) -> usize {
    let n = net.node_count();
    let per_edge = if net.is_directed() { 1 } else { 2 };
    n * (n - 1) - per_edge * net.edge_count()
}

fn context(
    net: &Network,
    oracle: &mut DistanceOracle,
    vars: VarSet,
    u: NodeId,
    v: NodeId,
    xi: f64,
) -> EdgeContext {
    let mut c = EdgeContext {
        i: u as f64,
        j: v as f64,
        xi,
        ..Default::default()
    };
    let directed = net.is_directed();
    if vars.contains(Var::Ki) {
        c.k_i = net.total_degree(u) as f64;
    }
    if vars.contains(Var::Kj) {
        c.k_j = net.total_degree(v) as f64;
    }
    let deg = |w: NodeId, inward: bool| {
        if !directed {
            net.total_degree(w)
        } else if inward {
            net.in_degree_unchecked(w)
        } else {
            net.out_degree_unchecked(w)
        }
    };
    if vars.contains(Var::KinI) {
        c.kin_i = deg(u, true) as f64;
    }
    if vars.contains(Var::KinJ) {
        c.kin_j = deg(v, true) as f64;
    }
    if vars.contains(Var::KoutI) {
        c.kout_i = deg(u, false) as f64;
    }
    if vars.contains(Var::KoutJ) {
        c.kout_j = deg(v, false) as f64;
    }
    if vars.contains(Var::D) {
        c.d = oracle.distance(net, u, v, DistanceKind::Undirected) as f64;
    }
    if vars.contains(Var::Dd) {
        c.dd = oracle.distance(net, u, v, DistanceKind::Directed) as f64;
    }
    if vars.contains(Var::Dr) {
        c.dr = oracle.distance(net, u, v, DistanceKind::Reverse) as f64;
    }
    c
}

/// Grows a network from `N` isolated nodes.
pub fn generate(tree: &GeneratorTree, cfg: &GenerationConfig) -> Result<GenerationResult> {
    grow(&[], tree, cfg, None)
}

/// Grows the remaining edges of `initial`; `xi` counts the pre-existing edges.
pub fn generate_from(initial: &Network, tree: &GeneratorTree, cfg: &GenerationConfig) -> Result<GenerationResult> {
    if initial.node_count() != cfg.node_count || initial.is_directed() != cfg.directed {
        return Err(Error::input(format!(
            "initial network ({} nodes, directed={}) does not match the configuration ({} nodes, directed={})",
            initial.node_count(),
            initial.is_directed(),
            cfg.node_count,
            cfg.directed
        )));
    }
    if initial.edge_count() >= cfg.target_edge_count {
        return Err(Error::input(format!(
            "initial network already has {} edges, target is {}",
            initial.edge_count(),
            cfg.target_edge_count
        )));
    }
    grow(initial.edges(), tree, cfg, None)
}

/// Observer called after every edge insertion, including replayed initial edges.
pub type GrowthObserver<'a> = &'a mut dyn FnMut(&Network, &DistanceOracle);

/// [`generate_from`] with a per-edge observer, for inspecting the distance oracle.
pub fn generate_observed(
    initial: &[(NodeId, NodeId)],
    tree: &GeneratorTree,
    cfg: &GenerationConfig,
    observer: GrowthObserver<'_>,
) -> Result<GenerationResult> {
    grow(initial, tree, cfg, Some(observer))
}

fn grow(
    initial: &[(NodeId, NodeId)],
    tree: &GeneratorTree,
    cfg: &GenerationConfig,
    mut observer: Option<GrowthObserver<'_>>,
) -> Result<GenerationResult> {
    cfg.validate()?;
    if !tree.is_well_formed() {
        return Err(Error::input("generator tree is not well formed"));
    }
    for &x in &cfg.snapshot_ratios {
        if cfg.snapshot_edge_count(x) < initial.len() {
            return Err(Error::input(format!(
                "snapshot at xi={x} precedes the {} initial edges",
                initial.len()
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // walkers draw millions of numbers per network, so they get a fast stream
    let mut walk_rng = SmallRng::seed_from_u64(rng.gen());
    let target = cfg.target_edge_count;
    let mut net = Network::new(cfg.node_count, cfg.directed, target)?;
    let vars = tree.variables();
    let mut oracle = DistanceOracle::new(
        cfg.distance_mode,
        &net,
        vars.needs_undirected_distance(),
        vars.needs_directed_distance(),
        cfg.rw_steps_per_edge,
        cfg.sentinel,
    );

    // replaying the initial edges lets random walkers see the network grow
    for &(u, v) in initial {
        net.add_edge(u, v)?;
        oracle.on_edge_added(&net, &mut walk_rng);
        if let Some(obs) = observer.as_mut() {
            obs(&net, &oracle);
        }
    }

    let mut sample = Vec::new();
    let mut weights = Vec::new();
    while net.edge_count() < target {
        let available = available_candidates(&net);
        if available == 0 {
            return Err(Error::Internal("candidate set exhausted before the target".into()));
        }
        let size = sample_size(available, cfg.sampling_ratio, cfg.sample_floor);
        sample_candidates(&net, available, size, &mut rng, &mut sample);
        let xi = net.edge_count() as f64 / target as f64;
        weights.clear();
        for &(u, v) in &sample {
            let ctx = context(&net, &mut oracle, vars, u, v, xi);
            weights.push(tree.evaluate(&ctx));
        }
        let (u, v) = sample[select(&weights, &mut rng)];
        net.insert_unchecked(u, v);
        oracle.on_edge_added(&net, &mut walk_rng);
        if let Some(obs) = observer.as_mut() {
            obs(&net, &oracle);
        }
    }

    let snapshots = cfg
        .snapshot_ratios
        .iter()
        .map(|&xi| {
            Ok(Snapshot {
                xi,
                network: net.prefix(cfg.snapshot_edge_count(xi))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GenerationResult {
        network: net,
        snapshots,
        seed: cfg.seed,
    })
}

/// Uniform random network with exactly `edges` edges (G(N, M)).
pub fn erdos_renyi<R: Rng + ?Sized>(nodes: usize, edges: usize, directed: bool, rng: &mut R) -> Result<Network> {
    let mut net = Network::new(nodes, directed, edges.max(1))?;
    if edges == 0 {
        return Ok(net);
    }
    let capacity = Network::capacity_for(nodes, directed);
    if edges > capacity {
        return Err(Error::input(format!("{edges} edges exceed capacity {capacity}")));
    }
    if 2 * edges <= capacity {
        while net.edge_count() < edges {
            let u = rng.gen_range(0..nodes) as NodeId;
            let v = rng.gen_range(0..nodes) as NodeId;
            if u != v && !net.has_edge(u, v) {
                net.insert_unchecked(u, v);
            }
        }
    } else {
        let mut pairs = Vec::with_capacity(capacity);
        for u in 0..nodes as NodeId {
            for v in 0..nodes as NodeId {
                if u != v && (directed || u < v) {
                    pairs.push((u, v));
                }
            }
        }
        for k in index::sample(rng, pairs.len(), edges) {
            let (u, v) = pairs[k];
            net.insert_unchecked(u, v);
        }
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(s: &str) -> GeneratorTree {
        GeneratorTree::parse(s).unwrap()
    }

    #[test]
    fn sample_size_floor_and_cap() {
        assert_eq!(sample_size(39_800, 0.0006, 2), 24);
        assert_eq!(sample_size(100, 0.0006, 2), 2);
        assert_eq!(sample_size(1, 0.0006, 2), 1);
    }

    #[test]
    fn complete_graph_is_forced() {
        let cfg = GenerationConfig::new(10, 45, false).with_seed(3);
        let res = generate(&tree("(pow k k)"), &cfg).unwrap();
        assert_eq!(res.network.edge_count(), 45);
        for u in 0..10 {
            assert_eq!(res.network.total_degree(u), 9);
        }
    }

    #[test]
    fn snapshots_hold_rounded_counts() {
        let cfg = GenerationConfig::new(30, 101, false).with_seed(1).with_snapshots(&[0.25, 0.5, 1.0]);
        let res = generate(&tree("k"), &cfg).unwrap();
        let counts: Vec<_> = res.snapshots.iter().map(|s| s.network.edge_count()).collect();
        assert_eq!(counts, vec![25, 51, 101]);
        assert_eq!(&res.network.edges()[..25], res.snapshots[0].network.edges());
    }

    #[test]
    fn same_seed_same_edges() {
        let cfg = GenerationConfig::new(40, 120, true).with_seed(11);
        let t = tree("(+ dd (* kin_j 2))");
        let a = generate(&t, &cfg).unwrap();
        let b = generate(&t, &cfg).unwrap();
        assert_eq!(a.network.edges(), b.network.edges());
        let c = generate(&t, &cfg.clone().with_seed(12)).unwrap();
        assert_ne!(a.network.edges(), c.network.edges());
    }

    #[test]
    fn first_added_edge_sees_initial_ratio() {
        // the weight is nonzero only when xi equals 3/10, which the
        // generator sees exactly once: on the first added edge
        let initial = Network::from_edges(6, false, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let cfg = GenerationConfig::new(6, 10, false).with_seed(2);
        let res = generate_from(&initial, &tree("(= xi 0.3 1 0)"), &cfg).unwrap();
        assert_eq!(&res.network.edges()[..3], initial.edges());
        assert_eq!(res.network.edge_count(), 10);

        let almost = Network::from_edges(6, false, &res.network.edges()[..9]).unwrap();
        let one = generate_from(&almost, &tree("1"), &cfg).unwrap();
        assert_eq!(one.network.edge_count(), 10);
    }

    #[test]
    fn generate_from_rejects_bad_sizes() {
        let initial = Network::from_edges(5, false, &[(0, 1), (1, 2)]).unwrap();
        assert!(generate_from(&initial, &tree("1"), &GenerationConfig::new(6, 4, false)).is_err());
        assert!(generate_from(&initial, &tree("1"), &GenerationConfig::new(5, 2, false)).is_err());
        let snap = GenerationConfig::new(5, 8, false).with_snapshots(&[0.1, 1.0]);
        assert!(generate_from(&initial, &tree("1"), &snap).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(GenerationConfig::new(10, 46, false).validate().is_err());
        assert!(GenerationConfig::new(10, 90, true).validate().is_ok());
        assert!(GenerationConfig::new(10, 20, false).with_snapshots(&[0.5]).validate().is_err());
        assert!(GenerationConfig::new(10, 20, false).with_snapshots(&[0.5, 0.4, 1.0]).validate().is_err());
    }

    #[test]
    fn selection_is_proportional() {
        let p = selection_probabilities(&[1.0, 3.0, 0.0]);
        assert_eq!(p, vec![0.25, 0.75, 0.0]);
        assert_eq!(selection_probabilities(&[0.0, 0.0]), vec![0.5, 0.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let hits = (0..10_000).filter(|_| select(&[1.0, 3.0, 0.0], &mut rng) == 1).count();
        assert!((hits as f64 / 10_000.0 - 0.75).abs() < 0.02);
    }

    #[test]
    fn erdos_renyi_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(erdos_renyi(50, 300, false, &mut rng).unwrap().edge_count(), 300);
        assert_eq!(erdos_renyi(10, 80, true, &mut rng).unwrap().edge_count(), 80);
    }
}
