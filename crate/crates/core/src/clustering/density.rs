use alloc::vec::Vec;

use crate::graph::DirectedGraph;
use crate::{Error, Result};

/// Link counts between clusters and their row-normalized form.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DensityMatrix {
    pub k: usize,
    /// `counts[i * k + j]`: links from cluster `i` emitters to cluster `j`.
    pub counts: Vec<u64>,
    /// Each non-empty row sums to 1; empty rows are all zero.
    pub normalized: Vec<f64>,
    /// Clusters that emit no links.
    pub empty_rows: Vec<usize>,
}

impl DensityMatrix {
    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.k + j]
    }

    pub fn probability(&self, i: usize, j: usize) -> f64 {
        self.normalized[i * self.k + j]
    }
}

/// Tallies every edge of `g` by (emitter cluster, receiver cluster).
/// `clusters` is aligned with `g`'s nodes.
pub fn density_matrix(g: &DirectedGraph, clusters: &[Option<usize>], k: usize) -> Result<DensityMatrix> {
    if clusters.len() != g.node_count() {
        return Err(Error::DimensionMismatch { expected: g.node_count(), got: clusters.len() });
    }
    let cluster_of = |ix: usize| match clusters[ix] {
        None => Err(Error::Unclustered(g.node(ix).id.clone())),
        Some(c) if c >= k => Err(Error::InvalidConfig(alloc::format!(
            "node `{}` has cluster {c} but k = {k}",
            g.node(ix).id
        ))),
        Some(c) => Ok(c),
    };
    let mut counts = alloc::vec![0u64; k * k];
    for (a, b) in g.edges() {
        counts[cluster_of(a)? * k + cluster_of(b)?] += 1;
    }
    let mut normalized = alloc::vec![0.0; k * k];
    let mut empty_rows = Vec::new();
    for i in 0..k {
        let row = &counts[i * k..(i + 1) * k];
        let total: u64 = row.iter().sum();
        if total == 0 {
            empty_rows.push(i);
            continue;
        }
        for j in 0..k {
            normalized[i * k + j] = row[j] as f64 / total as f64;
        }
    }
    Ok(DensityMatrix { k, counts, normalized, empty_rows })
}
