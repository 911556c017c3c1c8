use alloc::vec::Vec;

use super::Layout;
use crate::clustering::{kmeans, silhouette};
use crate::graph::DirectedGraph;
use crate::{Error, Result};

const RESTARTS: usize = 10;
const AUTO_MAX: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PartitionCount {
    Fixed(usize),
    /// Best mean silhouette over 2..=15.
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Partition id per node, 0-based.
    pub labels: Vec<usize>,
    pub q: usize,
    pub silhouette: Option<f64>,
}

/// k-means on the layout coordinates.
pub fn spatial_partition(layout: &Layout, count: PartitionCount, seed: u64) -> Result<Partition> {
    let points: Vec<Vec<f64>> = layout.coords.iter().map(|p| p.to_vec()).collect();
    match count {
        PartitionCount::Fixed(q) => {
            let fit = kmeans(&points, q, seed, RESTARTS)?;
            Ok(Partition { labels: fit.assignments, q, silhouette: None })
        }
        PartitionCount::Auto => {
            let hi = AUTO_MAX.min(points.len().saturating_sub(1));
            if hi < 2 {
                let fit = kmeans(&points, 1, seed, 1)?;
                return Ok(Partition { labels: fit.assignments, q: 1, silhouette: None });
            }
            let mut best: Option<(f64, Partition)> = None;
            for q in 2..=hi {
                let fit = kmeans(&points, q, seed, RESTARTS)?;
                let s = silhouette(&points, &fit.assignments, q);
                if best.as_ref().is_none_or(|(b, _)| s > *b) {
                    best = Some((s, Partition { labels: fit.assignments, q, silhouette: Some(s) }));
                }
            }
            Ok(best.expect("non-empty range").1)
        }
    }
}

/// Per popularity cluster: emitted links, those crossing partitions, and
/// their ratio (`None` for clusters that emit nothing).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InterClique {
    pub emitted: Vec<u64>,
    pub inter: Vec<u64>,
    pub fractions: Vec<Option<f64>>,
}

impl InterClique {
    /// Share of all links that cross partitions.
    pub fn global_fraction(&self) -> Option<f64> {
        let e: u64 = self.emitted.iter().sum();
        let i: u64 = self.inter.iter().sum();
        (e > 0).then(|| i as f64 / e as f64)
    }
}

pub fn inter_clique_fraction(
    g: &DirectedGraph,
    partition: &[usize],
    clusters: &[Option<usize>],
    k: usize,
) -> Result<InterClique> {
    let n = g.node_count();
    for len in [partition.len(), clusters.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, got: len });
        }
    }
    let mut emitted = alloc::vec![0u64; k];
    let mut inter = alloc::vec![0u64; k];
    for (a, b) in g.edges() {
        let c = match clusters[a] {
            Some(c) if c < k => c,
            Some(c) => return Err(Error::InvalidConfig(alloc::format!("cluster {c} out of range for k = {k}"))),
            None => return Err(Error::Unclustered(g.node(a).id.clone())),
        };
        emitted[c] += 1;
        if partition[a] != partition[b] {
            inter[c] += 1;
        }
    }
    let fractions = emitted.iter().zip(&inter).map(|(&e, &i)| (e > 0).then(|| i as f64 / e as f64)).collect();
    Ok(InterClique { emitted, inter, fractions })
}
