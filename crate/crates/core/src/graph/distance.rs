use std::collections::VecDeque;

use super::{Network, NodeId};
use crate::error::{Error, Result};

/// Marker for "no path" in raw BFS rows.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    /// Shortest path ignoring edge direction.
    Undirected,
    /// Shortest directed path `u -> v`.
    Directed,
    /// Directed path `v -> u`.
    Reverse,
}

fn step_neighbors(net: &Network, v: NodeId, kind: DistanceKind) -> &[NodeId] {
    match kind {
        DistanceKind::Undirected => net.undirected_neighbors(v),
        DistanceKind::Directed => net.out_neighbors(v),
        DistanceKind::Reverse => net.in_neighbors(v),
    }
}

/// Hop distances from `source` to every node along the given orientation.
///
/// `Reverse` walks in-edges, so entry `v` is the directed distance `v -> source`.
pub fn bfs_distances(net: &Network, source: NodeId, kind: DistanceKind) -> Vec<u32> {
    let n = net.node_count();
    let mut dist = vec![UNREACHABLE; n];
    let mut queue = VecDeque::with_capacity(n);
    dist[source as usize] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let next = dist[v as usize] + 1;
        for &w in step_neighbors(net, v, kind) {
            if dist[w as usize] == UNREACHABLE {
                dist[w as usize] = next;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Shortest hop distance between two distinct nodes, or `sentinel` when unreachable.
pub fn exact_distance(
    net: &Network,
    u: NodeId,
    v: NodeId,
    kind: DistanceKind,
    sentinel: u32,
) -> Result<u32> {
    let n = net.node_count();
    if u as usize >= n || v as usize >= n {
        return Err(Error::input(format!("node id out of range for {n} nodes")));
    }
    if u == v {
        return Err(Error::input("distance from a node to itself is undefined"));
    }
    // d_R(u, v) = d_D(v, u)
    let (src, dst, kind) = match kind {
        DistanceKind::Reverse => (v, u, DistanceKind::Directed),
        k => (u, v, k),
    };
    let mut dist = vec![UNREACHABLE; n];
    let mut queue = VecDeque::new();
    dist[src as usize] = 0;
    queue.push_back(src);
    while let Some(x) = queue.pop_front() {
        let next = dist[x as usize] + 1;
        for &w in step_neighbors(net, x, kind) {
            if w == dst {
                return Ok(next);
            }
            if dist[w as usize] == UNREACHABLE {
                dist[w as usize] = next;
                queue.push_back(w);
            }
        }
    }
    Ok(sentinel)
}

/// Memoised BFS rows for one network state. Call [`ExactDistanceCache::invalidate`]
/// after every edge insertion.
#[derive(Debug, Default)]
pub struct ExactDistanceCache {
    rows: std::collections::HashMap<(NodeId, DistanceKind), Vec<u32>>,
}

impl ExactDistanceCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn invalidate(&mut self) {
        self.rows.clear();
    }

    pub fn distance(
        &mut self,
        net: &Network,
        u: NodeId,
        v: NodeId,
        kind: DistanceKind,
        sentinel: u32,
    ) -> u32 {
        let (src, dst, kind) = match kind {
            DistanceKind::Reverse => (v, u, DistanceKind::Directed),
            k => (u, v, k),
        };
        let row = self
            .rows
            .entry((src, kind))
            .or_insert_with(|| bfs_distances(net, src, kind));
        match row[dst as usize] {
            UNREACHABLE => sentinel,
            d => d,
        }
    }
}
