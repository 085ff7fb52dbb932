//! Plain-text edge lists.
//!
//! ```text
//! # nodes=4 directed=1
//! 0 1
//! 2 3
//! ```
//!
//! The header is optional; without it the node count is one more than the
//! largest id seen and the network is undirected unless the caller says
//! otherwise. Other `#` lines are comments.

use std::io::{BufRead, Write};

use super::{Network, NodeId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EdgeListHeader {
    pub nodes: Option<usize>,
    pub directed: Option<bool>,
}

fn parse_header(line: &str) -> Option<EdgeListHeader> {
    let body = line.trim_start_matches('#').trim();
    let mut header = EdgeListHeader::default();
    for token in body.split_whitespace() {
        let (key, value) = token.split_once('=')?;
        match key {
            "nodes" => header.nodes = Some(value.parse().ok()?),
            "directed" => {
                header.directed = Some(match value {
                    "0" | "false" => false,
                    "1" | "true" => true,
                    _ => return None,
                })
            }
            _ => return None,
        }
    }
    (header.nodes.is_some() || header.directed.is_some()).then_some(header)
}

/// Reads an edge list. `directed` is used when the file has no header
/// declaring it. The resulting network's target edge count equals its edge count.
pub fn read_edge_list<R: BufRead>(reader: R, directed: Option<bool>) -> Result<Network> {
    let mut header = EdgeListHeader::default();
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            if edges.is_empty() {
                if let Some(h) = parse_header(trimmed) {
                    header = h;
                }
            }
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let mut field = |name: &str| -> Result<NodeId> {
            parts
                .next()
                .ok_or_else(|| Error::input(format!("line {}: missing {name} id", lineno + 1)))?
                .parse()
                .map_err(|_| Error::input(format!("line {}: invalid {name} id", lineno + 1)))
        };
        let u = field("source")?;
        let v = field("target")?;
        edges.push((u, v));
    }
    let max_id = edges.iter().map(|&(u, v)| u.max(v) as usize + 1).max().unwrap_or(0);
    let nodes = header.nodes.unwrap_or(max_id);
    if nodes < max_id {
        return Err(Error::input(format!(
            "edge list references node {} but header declares {nodes} nodes",
            max_id - 1
        )));
    }
    let directed = header.directed.or(directed).unwrap_or(false);
    Network::from_edges(nodes, directed, &edges)
}

/// Writes the header and every edge in insertion order.
pub fn write_edge_list<W: Write>(net: &Network, mut out: W) -> Result<()> {
    writeln!(
        out,
        "# nodes={} directed={}",
        net.node_count(),
        u8::from(net.is_directed())
    )?;
    for &(u, v) in net.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_order() {
        let net = Network::from_edges(5, true, &[(3, 1), (0, 4), (1, 3)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&net, &mut buf).unwrap();
        let back = read_edge_list(buf.as_slice(), None).unwrap();
        assert_eq!(back.node_count(), 5);
        assert!(back.is_directed());
        assert_eq!(back.edges(), net.edges());
    }

    #[test]
    fn headerless_input_infers_nodes() {
        let text = "# a comment\n0 2\n\n2 5\n";
        let net = read_edge_list(text.as_bytes(), None).unwrap();
        assert_eq!(net.node_count(), 6);
        assert!(!net.is_directed());
        assert_eq!(net.edge_count(), 2);
    }

    #[test]
    fn bad_lines_are_reported() {
        assert!(read_edge_list("0 x\n".as_bytes(), None).is_err());
        assert!(read_edge_list("# nodes=2 directed=0\n0 3\n".as_bytes(), None).is_err());
        assert!(read_edge_list("1 1\n".as_bytes(), None).is_err());
    }
}
