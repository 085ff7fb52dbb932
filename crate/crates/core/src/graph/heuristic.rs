use rand::Rng;
use serde::{Deserialize, Serialize};

use super::distance::{bfs_distances, DistanceKind, ExactDistanceCache, UNREACHABLE};
use super::{Network, NodeId};

/// Starting estimate for every pair in the random-walk matrix.
pub const HEURISTIC_INIT: u8 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    Exact,
    Heuristic,
}

/// Pairwise hop-count estimates maintained by one random walker per node.
///
/// After each batch every walker returns to its origin. A walker from `i`
/// that reaches `j != i` after `c` steps of the current batch lowers
/// `m[i][j]` to `c` when that is smaller. Entries only ever decrease.
#[derive(Debug, Clone)]
pub struct RandomWalkDistances {
    n: usize,
    ignore_direction: bool,
    symmetric: bool,
    matrix: Vec<u8>,
}

impl RandomWalkDistances {
    /// `ignore_direction` walks undirected adjacency; otherwise walkers follow
    /// out-edges. For undirected networks the matrix is kept symmetric.
    pub fn new(net: &Network, ignore_direction: bool) -> Self {
        let n = net.node_count();
        Self {
            n,
            ignore_direction,
            symmetric: !net.is_directed(),
            matrix: vec![HEURISTIC_INIT; n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: NodeId, j: NodeId) -> u8 {
        self.matrix[i as usize * self.n + j as usize]
    }

    /// Advances every walker `steps` moves from its origin.
    pub fn step<R: Rng + ?Sized>(&mut self, net: &Network, steps: usize, rng: &mut R) {
        let n = self.n;
        for origin in 0..n as NodeId {
            let mut pos = origin;
            for c in 1..=steps {
                let nbrs = if self.ignore_direction {
                    net.undirected_neighbors(pos)
                } else {
                    net.out_neighbors(pos)
                };
                if nbrs.is_empty() {
                    // stuck walkers stay put; isolated origins never move at all
                    if pos == origin {
                        break;
                    }
                    continue;
                }
                pos = nbrs[rng.gen_range(0..nbrs.len() as u32) as usize];
                if pos == origin {
                    continue;
                }
                let c = c.min(u8::MAX as usize) as u8;
                let k = origin as usize * n + pos as usize;
                if c < self.matrix[k] {
                    self.matrix[k] = c;
                    if self.symmetric {
                        self.matrix[pos as usize * n + origin as usize] = c;
                    }
                }
            }
        }
    }

    /// Fraction of ordered pairs `i != j` whose estimate equals the exact
    /// distance on `net` (unreachable pairs compare against `sentinel`).
    pub fn correct_fraction(&self, net: &Network, sentinel: u32) -> f64 {
        let kind = if self.ignore_direction {
            DistanceKind::Undirected
        } else {
            DistanceKind::Directed
        };
        let n = self.n;
        if n < 2 {
            return 1.0;
        }
        let mut correct = 0usize;
        for i in 0..n as NodeId {
            let row = bfs_distances(net, i, kind);
            for j in 0..n as NodeId {
                if i == j {
                    continue;
                }
                let exact = match row[j as usize] {
                    UNREACHABLE => sentinel,
                    d => d,
                };
                if u32::from(self.get(i, j)) == exact {
                    correct += 1;
                }
            }
        }
        correct as f64 / (n * (n - 1)) as f64
    }
}

/// Distance provider used while a network is being grown.
#[derive(Debug)]
pub enum DistanceOracle {
    Exact {
        cache: ExactDistanceCache,
        sentinel: u32,
    },
    Heuristic {
        undirected: Option<RandomWalkDistances>,
        directed: Option<RandomWalkDistances>,
        steps: usize,
    },
}

impl DistanceOracle {
    /// `need_undirected` / `need_directed` select which estimates a heuristic
    /// oracle maintains; unused matrices are never allocated or walked.
    pub fn new(
        mode: DistanceMode,
        net: &Network,
        need_undirected: bool,
        need_directed: bool,
        steps: usize,
        sentinel: u32,
    ) -> Self {
        match mode {
            DistanceMode::Exact => DistanceOracle::Exact {
                cache: ExactDistanceCache::new(),
                sentinel,
            },
            DistanceMode::Heuristic => {
                let directed = net.is_directed();
                // undirected networks answer every kind from one matrix
                let need_und = need_undirected || (!directed && need_directed);
                DistanceOracle::Heuristic {
                    undirected: need_und.then(|| RandomWalkDistances::new(net, true)),
                    directed: (directed && need_directed).then(|| RandomWalkDistances::new(net, false)),
                    steps,
                }
            }
        }
    }

    /// Must be called once after each edge insertion.
    pub fn on_edge_added<R: Rng + ?Sized>(&mut self, net: &Network, rng: &mut R) {
        match self {
            DistanceOracle::Exact { cache, .. } => cache.invalidate(),
            DistanceOracle::Heuristic {
                undirected,
                directed,
                steps,
            } => {
                if let Some(m) = undirected {
                    m.step(net, *steps, rng);
                }
                if let Some(m) = directed {
                    m.step(net, *steps, rng);
                }
            }
        }
    }

    pub fn distance(&mut self, net: &Network, u: NodeId, v: NodeId, kind: DistanceKind) -> u32 {
        match self {
            DistanceOracle::Exact { cache, sentinel } => {
                let kind = if net.is_directed() {
                    kind
                } else {
                    DistanceKind::Undirected
                };
                cache.distance(net, u, v, kind, *sentinel)
            }
            DistanceOracle::Heuristic {
                undirected,
                directed,
                ..
            } => {
                let matrix = match (kind, directed.as_ref()) {
                    (DistanceKind::Undirected, _) | (_, None) => undirected.as_ref(),
                    (_, Some(d)) => Some(d),
                };
                let Some(m) = matrix else {
                    return u32::from(HEURISTIC_INIT);
                };
                match kind {
                    DistanceKind::Reverse if directed.is_some() => u32::from(m.get(v, u)),
                    _ => u32::from(m.get(u, v)),
                }
            }
        }
    }

    pub fn undirected_matrix(&self) -> Option<&RandomWalkDistances> {
        match self {
            DistanceOracle::Heuristic { undirected, .. } => undirected.as_ref(),
            _ => None,
        }
    }
}
