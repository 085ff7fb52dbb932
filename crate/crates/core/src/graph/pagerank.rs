use serde::{Deserialize, Serialize};

use super::Network;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageRankParams {
    /// Damping factor in (0, 1).
    pub alpha: f64,
    /// Teleport term; `None` means `(1 - alpha) / N`.
    pub beta: Option<f64>,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        Self {
            alpha: 0.85,
            beta: None,
            tolerance: 1e-8,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PageRankDirection {
    Direct,
    Reverse,
}

#[derive(Debug, Clone)]
pub struct PageRankResult {
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Power iteration of `x_i = alpha * sum_m a_mi / kout(m) * x_m + beta`.
///
/// Nodes without out-edges use `kout = 1`, which contributes nothing since
/// they have no outgoing terms; their mass simply leaks. Undirected networks
/// treat every edge as bidirectional, so both directions coincide.
pub fn pagerank(net: &Network, params: &PageRankParams, direction: PageRankDirection) -> Result<PageRankResult> {
    let n = net.node_count();
    if !(params.alpha > 0.0 && params.alpha < 1.0) {
        return Err(Error::input(format!("pagerank alpha {} outside (0,1)", params.alpha)));
    }
    let beta = params.beta.unwrap_or((1.0 - params.alpha) / n as f64);
    let reverse = direction == PageRankDirection::Reverse && net.is_directed();

    // In the (possibly transposed) graph, a node pulls from its predecessors.
    let preds = |v: u32| if reverse { net.out_neighbors(v) } else { net.in_neighbors(v) };
    let out_deg = |v: u32| {
        let k = if reverse {
            net.in_degree_unchecked(v)
        } else {
            net.out_degree_unchecked(v)
        };
        k.max(1) as f64
    };
    let inv_out: Vec<f64> = (0..n as u32).map(|v| 1.0 / out_deg(v)).collect();

    let mut x = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut contrib = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iterations {
        iterations += 1;
        for v in 0..n {
            contrib[v] = x[v] * inv_out[v];
        }
        let mut delta: f64 = 0.0;
        for v in 0..n {
            let s: f64 = preds(v as u32).iter().map(|&m| contrib[m as usize]).sum();
            next[v] = params.alpha * s + beta;
            delta = delta.max((next[v] - x[v]).abs());
        }
        std::mem::swap(&mut x, &mut next);
        if delta < params.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("pagerank did not converge within {} iterations", params.max_iterations);
    }
    Ok(PageRankResult {
        scores: x,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_is_uniform() {
        let net = Network::from_edges(4, false, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let r = pagerank(&net, &PageRankParams::default(), PageRankDirection::Direct).unwrap();
        assert!(r.converged);
        for s in &r.scores {
            assert!((s - r.scores[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn sink_dominates() {
        let net = Network::from_edges(2, true, &[(0, 1)]).unwrap();
        let r = pagerank(&net, &PageRankParams::default(), PageRankDirection::Direct).unwrap();
        assert!(r.scores[1] > r.scores[0]);
        let rev = pagerank(&net, &PageRankParams::default(), PageRankDirection::Reverse).unwrap();
        assert!(rev.scores[0] > rev.scores[1]);
    }

    #[test]
    fn undirected_direct_equals_reverse() {
        let net = Network::from_edges(5, false, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let a = pagerank(&net, &PageRankParams::default(), PageRankDirection::Direct).unwrap();
        let b = pagerank(&net, &PageRankParams::default(), PageRankDirection::Reverse).unwrap();
        assert_eq!(a.scores, b.scores);
    }

    #[test]
    fn non_convergence_returns_current_vector() {
        let net = Network::from_edges(3, true, &[(0, 1), (1, 2)]).unwrap();
        let params = PageRankParams {
            max_iterations: 1,
            tolerance: 0.0,
            ..Default::default()
        };
        let r = pagerank(&net, &params, PageRankDirection::Direct).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 1);
        assert!(r.scores.iter().all(|s| s.is_finite() && *s >= 0.0));
    }
}
