use super::{Network, NodeId};
use crate::error::{Error, Result};

pub const DIRECTED_TRIAD_NAMES: [&str; 16] = [
    "003", "012", "102", "021D", "021U", "021C", "111D", "111U", "030T", "030C", "201", "120D",
    "120U", "120C", "210", "300",
];

pub const UNDIRECTED_TRIAD_NAMES: [&str; 4] = ["empty", "edge", "path", "triangle"];

// Class index for each 6-bit code built by `tricode`.
const TRITYPES: [u8; 64] = [
    0, 1, 1, 2, 1, 3, 5, 7, 1, 5, 4, 6, 2, 7, 6, 10, 1, 5, 3, 7, 4, 8, 8, 12, 5, 9, 8, 13, 6, 13,
    11, 14, 1, 4, 5, 6, 5, 8, 9, 13, 3, 8, 8, 11, 7, 12, 13, 14, 2, 6, 7, 10, 6, 11, 13, 14, 7,
    13, 12, 14, 10, 14, 14, 15,
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriadCensusCounts {
    pub counts: Vec<u64>,
}

impl TriadCensusCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn names(&self) -> &'static [&'static str] {
        if self.counts.len() == 16 {
            &DIRECTED_TRIAD_NAMES
        } else {
            &UNDIRECTED_TRIAD_NAMES
        }
    }
}

fn choose3(n: u64) -> u64 {
    if n < 3 {
        0
    } else {
        n * (n - 1) / 2 * (n - 2) / 3
    }
}

#[inline]
fn tricode(net: &Network, v: NodeId, u: NodeId, w: NodeId) -> usize {
    let mut code = 0;
    for (bit, (a, b)) in [(v, u), (u, v), (v, w), (w, v), (u, w), (w, u)].into_iter().enumerate() {
        if net.has_edge(a, b) {
            code |= 1 << bit;
        }
    }
    code
}

/// Counts triads per isomorphism class: 16 directed classes, or 4
/// undirected classes (by edge count) for undirected networks.
pub fn triad_census(net: &Network) -> Result<TriadCensusCounts> {
    let n = net.node_count();
    if n < 3 {
        return Err(Error::input(format!("triad census needs at least 3 nodes, got {n}")));
    }
    if net.is_directed() {
        Ok(directed_census(net))
    } else {
        Ok(undirected_census(net))
    }
}

/// Neighbourhood-based census: connected triads are enumerated once from
/// their lowest-id dyad, dyadic triads are counted in bulk, and 003 is the
/// remainder of C(N,3).
fn directed_census(net: &Network) -> TriadCensusCounts {
    let n = net.node_count();
    let mut census = [0u64; 16];
    // stamp[w] == mark means w is in the current neighbourhood union
    let mut stamp = vec![0u64; n];
    let mut mark = 0u64;
    for v in 0..n as NodeId {
        for &u in net.undirected_neighbors(v) {
            if u <= v {
                continue;
            }
            let dyad = if net.has_edge(v, u) && net.has_edge(u, v) { 2 } else { 1 };
            mark += 1;
            stamp[u as usize] = mark;
            stamp[v as usize] = mark;
            let mut union_size = 0u64;
            for &w in net.undirected_neighbors(u).iter().chain(net.undirected_neighbors(v)) {
                if stamp[w as usize] == mark {
                    continue;
                }
                stamp[w as usize] = mark;
                union_size += 1;
                if u < w || (v < w && w < u && !net.linked(v, w)) {
                    census[TRITYPES[tricode(net, v, u, w)] as usize] += 1;
                }
            }
            census[dyad] += n as u64 - union_size - 2;
        }
    }
    let connected: u64 = census[1..].iter().sum();
    census[0] = choose3(n as u64) - connected;
    TriadCensusCounts {
        counts: census.to_vec(),
    }
}

fn undirected_census(net: &Network) -> TriadCensusCounts {
    let n = net.node_count();
    let mut stamp = vec![u32::MAX; n];
    let mut triangles = 0u64;
    for v in 0..n as NodeId {
        for &w in net.undirected_neighbors(v) {
            stamp[w as usize] = v;
        }
        for &u in net.undirected_neighbors(v) {
            if u <= v {
                continue;
            }
            triangles += net
                .undirected_neighbors(u)
                .iter()
                .filter(|&&w| w > u && stamp[w as usize] == v)
                .count() as u64;
        }
    }
    let wedges: u64 = (0..n as NodeId)
        .map(|v| {
            let k = net.undirected_neighbors(v).len() as u64;
            k * k.saturating_sub(1) / 2
        })
        .sum();
    let paths = wedges - 3 * triangles;
    let e = net.edge_count() as u64;
    let single = e * (n as u64 - 2) - 2 * paths - 3 * triangles;
    let empty = choose3(n as u64) - single - paths - triangles;
    TriadCensusCounts {
        counts: vec![empty, single, paths, triangles],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_directed_triad() {
        let net = Network::new(3, true, 1).unwrap();
        let c = triad_census(&net).unwrap();
        assert_eq!(c.counts[0], 1);
        assert_eq!(c.total(), 1);
    }

    #[test]
    fn complete_mutual_triad() {
        let edges = [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)];
        let net = Network::from_edges(3, true, &edges).unwrap();
        let c = triad_census(&net).unwrap();
        assert_eq!(c.counts[15], 1);
        assert_eq!(c.total(), 1);
    }

    #[test]
    fn undirected_classes() {
        // triangle 0-1-2 plus pendant 3 on 2, node 4 isolated
        let net = Network::from_edges(5, false, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let c = triad_census(&net).unwrap();
        assert_eq!(c.counts[3], 1);
        assert_eq!(c.counts[2], 2); // 0-2-3, 1-2-3
        assert_eq!(c.total(), 10);
    }

    #[test]
    fn too_small() {
        let net = Network::new(2, true, 1).unwrap();
        assert!(triad_census(&net).is_err());
    }
}
