//! Network storage and the structural measurements built on it.

mod distance;
mod heuristic;
mod io;
mod pagerank;
mod triad;

pub use distance::{bfs_distances, exact_distance, DistanceKind, ExactDistanceCache, UNREACHABLE};
pub use heuristic::{DistanceMode, DistanceOracle, RandomWalkDistances, HEURISTIC_INIT};
pub use io::{read_edge_list, write_edge_list, EdgeListHeader};
pub use pagerank::{pagerank, PageRankDirection, PageRankParams, PageRankResult};
pub use triad::{triad_census, TriadCensusCounts, DIRECTED_TRIAD_NAMES, UNDIRECTED_TRIAD_NAMES};

use crate::error::{Error, Result};

pub type NodeId = u32;

/// Default value reported for pairs with no connecting path.
pub const DEFAULT_SENTINEL: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeKind {
    Total,
    In,
    Out,
}

/// Membership index over ordered node pairs.
#[derive(Debug, Clone)]
enum PairIndex {
    Dense { n: usize, bits: Vec<u64> },
    Sparse(std::collections::HashSet<u64>),
}

const DENSE_LIMIT: usize = 1 << 28;

impl PairIndex {
    fn new(n: usize) -> Self {
        if n.saturating_mul(n) <= DENSE_LIMIT {
            PairIndex::Dense {
                n,
                bits: vec![0; (n * n).div_ceil(64)],
            }
        } else {
            PairIndex::Sparse(Default::default())
        }
    }

    #[inline]
    fn contains(&self, u: NodeId, v: NodeId) -> bool {
        match self {
            PairIndex::Dense { n, bits } => {
                let k = u as usize * n + v as usize;
                bits[k >> 6] & (1 << (k & 63)) != 0
            }
            PairIndex::Sparse(set) => set.contains(&((u as u64) << 32 | v as u64)),
        }
    }

    #[inline]
    fn insert(&mut self, u: NodeId, v: NodeId) {
        match self {
            PairIndex::Dense { n, bits } => {
                let k = u as usize * *n + v as usize;
                bits[k >> 6] |= 1 << (k & 63);
            }
            PairIndex::Sparse(set) => {
                set.insert((u as u64) << 32 | v as u64);
            }
        }
    }
}

/// A simple graph over nodes `0..N` that only ever gains edges.
///
/// Edges are kept in insertion order so a finished network can be replayed
/// into its growth snapshots. For undirected networks both orientations of
/// an edge are marked in the pair index, and `adj_und` is the only
/// adjacency that is populated.
#[derive(Debug, Clone)]
pub struct Network {
    node_count: usize,
    directed: bool,
    target_edge_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    index: PairIndex,
    adj_out: Vec<Vec<NodeId>>,
    adj_in: Vec<Vec<NodeId>>,
    adj_und: Vec<Vec<NodeId>>,
}

impl Network {
    pub fn new(node_count: usize, directed: bool, target_edge_count: usize) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::input("network needs at least one node"));
        }
        if node_count > NodeId::MAX as usize {
            return Err(Error::input("node count exceeds 32-bit id space"));
        }
        let capacity = Self::capacity_for(node_count, directed);
        if target_edge_count == 0 || target_edge_count > capacity {
            return Err(Error::input(format!(
                "target edge count {target_edge_count} outside 1..={capacity}"
            )));
        }
        let lists = |on: bool| if on { vec![Vec::new(); node_count] } else { Vec::new() };
        Ok(Self {
            node_count,
            directed,
            target_edge_count,
            edges: Vec::new(),
            index: PairIndex::new(node_count),
            adj_out: lists(directed),
            adj_in: lists(directed),
            adj_und: vec![Vec::new(); node_count],
        })
    }

    /// Builds a network from an edge list, with `E` set to the edge count.
    pub fn from_edges(node_count: usize, directed: bool, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut net = Self::new(node_count, directed, edges.len().max(1))?;
        for &(u, v) in edges {
            net.add_edge(u, v)?;
        }
        Ok(net)
    }

    /// Maximum number of edges a simple graph on `n` nodes can hold.
    pub fn capacity_for(n: usize, directed: bool) -> usize {
        let ordered = n * n.saturating_sub(1);
        if directed {
            ordered
        } else {
            ordered / 2
        }
    }

    pub fn capacity(&self) -> usize {
        Self::capacity_for(self.node_count, self.directed)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn target_edge_count(&self) -> usize {
        self.target_edge_count
    }

    pub fn set_target_edge_count(&mut self, target: usize) -> Result<()> {
        if target < self.edges.len() || target == 0 || target > self.capacity() {
            return Err(Error::input(format!(
                "target edge count {target} incompatible with {} existing edges",
                self.edges.len()
            )));
        }
        self.target_edge_count = target;
        Ok(())
    }

    /// Current edge ratio `e / E`.
    pub fn edge_ratio(&self) -> f64 {
        self.edges.len() as f64 / self.target_edge_count as f64
    }

    /// Edges in insertion order.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    fn check_node(&self, v: NodeId) -> Result<()> {
        if (v as usize) < self.node_count {
            Ok(())
        } else {
            Err(Error::input(format!(
                "node {v} out of range for {} nodes",
                self.node_count
            )))
        }
    }

    /// True when `u -> v` exists (either orientation for undirected networks).
    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.index.contains(u, v)
    }

    /// True when the pair is linked in either direction.
    #[inline]
    pub fn linked(&self, u: NodeId, v: NodeId) -> bool {
        self.index.contains(u, v) || (self.directed && self.index.contains(v, u))
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::input(format!("self-loop on node {u}")));
        }
        if self.has_edge(u, v) {
            return Err(Error::input(format!("duplicate edge {u} {v}")));
        }
        if self.edges.len() >= self.target_edge_count {
            return Err(Error::input(format!(
                "network already holds its target of {} edges",
                self.target_edge_count
            )));
        }
        self.insert_unchecked(u, v);
        Ok(())
    }

    pub(crate) fn insert_unchecked(&mut self, u: NodeId, v: NodeId) {
        if self.directed {
            if !self.index.contains(v, u) {
                self.adj_und[u as usize].push(v);
                self.adj_und[v as usize].push(u);
            }
            self.index.insert(u, v);
            self.adj_out[u as usize].push(v);
            self.adj_in[v as usize].push(u);
        } else {
            self.index.insert(u, v);
            self.index.insert(v, u);
            self.adj_und[u as usize].push(v);
            self.adj_und[v as usize].push(u);
        }
        self.edges.push((u, v));
    }

    /// Out-neighbours; all neighbours for undirected networks.
    #[inline]
    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        if self.directed {
            &self.adj_out[v as usize]
        } else {
            &self.adj_und[v as usize]
        }
    }

    /// In-neighbours; all neighbours for undirected networks.
    #[inline]
    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        if self.directed {
            &self.adj_in[v as usize]
        } else {
            &self.adj_und[v as usize]
        }
    }

    /// Neighbours ignoring direction, each listed once.
    #[inline]
    pub fn undirected_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj_und[v as usize]
    }

    pub fn degree(&self, v: NodeId, kind: DegreeKind) -> Result<usize> {
        self.check_node(v)?;
        match (kind, self.directed) {
            (DegreeKind::Total, _) => Ok(self.total_degree(v)),
            (DegreeKind::In, true) => Ok(self.adj_in[v as usize].len()),
            (DegreeKind::Out, true) => Ok(self.adj_out[v as usize].len()),
            (_, false) => Err(Error::input("in/out degree requested on an undirected network")),
        }
    }

    /// In + out degree for directed networks, incident edges otherwise.
    #[inline]
    pub fn total_degree(&self, v: NodeId) -> usize {
        if self.directed {
            self.adj_in[v as usize].len() + self.adj_out[v as usize].len()
        } else {
            self.adj_und[v as usize].len()
        }
    }

    #[inline]
    pub(crate) fn in_degree_unchecked(&self, v: NodeId) -> usize {
        self.in_neighbors(v).len()
    }

    #[inline]
    pub(crate) fn out_degree_unchecked(&self, v: NodeId) -> usize {
        self.out_neighbors(v).len()
    }

    /// The same network truncated to its first `count` edges.
    pub fn prefix(&self, count: usize) -> Result<Network> {
        if count > self.edges.len() {
            return Err(Error::input(format!(
                "prefix of {count} edges requested from a network with {}",
                self.edges.len()
            )));
        }
        let mut net = Network::new(self.node_count, self.directed, self.target_edge_count)?;
        for &(u, v) in &self.edges[..count] {
            net.insert_unchecked(u, v);
        }
        Ok(net)
    }

    /// Relabels nodes through `perm` (old id -> new id), keeping edge order.
    pub fn relabeled(&self, perm: &[NodeId]) -> Result<Network> {
        if perm.len() != self.node_count {
            return Err(Error::input("permutation length differs from node count"));
        }
        let mut net = Network::new(self.node_count, self.directed, self.target_edge_count)?;
        for &(u, v) in &self.edges {
            net.add_edge(perm[u as usize], perm[v as usize])?;
        }
        Ok(net)
    }
}
