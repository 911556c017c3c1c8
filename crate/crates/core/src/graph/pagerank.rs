use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::DirectedGraph;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PageRankConfig {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig { damping: 0.85, tol: 1e-10, max_iter: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRank {
    /// Scores aligned with the graph's node positions.
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl PageRank {
    pub fn by_id(&self, g: &DirectedGraph) -> BTreeMap<String, f64> {
        g.nodes().iter().zip(&self.scores).map(|(n, &s)| (n.id.clone(), s)).collect()
    }
}

/// Power iteration with uniform teleport and dangling mass spread over all
/// nodes. Stops once the L1 change drops below `tol`; if `max_iter` runs
/// out first the last iterate is returned with `converged = false`.
pub fn pagerank(g: &DirectedGraph, cfg: &PageRankConfig) -> Result<PageRank> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let nf = n as f64;
    let d = cfg.damping;
    let mut rank = alloc::vec![1.0 / nf; n];
    let mut next = alloc::vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        iterations += 1;
        let dangling: f64 = (0..n).filter(|&i| g.out_degree(i) == 0).map(|i| rank[i]).sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        for (v, slot) in next.iter_mut().enumerate() {
            let inflow: f64 =
                g.predecessors(v).iter().map(|&u| rank[u] / g.out_degree(u) as f64).sum();
            *slot = base + d * inflow;
        }
        // renormalise against drift so the sum stays at 1 to rounding
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let delta: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        core::mem::swap(&mut rank, &mut next);
        if delta < cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(PageRank { scores: rank, iterations, converged })
}
