use crate::graph::{DirectedGraph, Scope};
use crate::{math, Error, Result};
use alloc::vec::Vec;

pub const DEFAULT_XMIN: usize = 5;
const MIN_NONZERO: usize = 100;
const MIN_TAIL: usize = 10;
/// KS distance above which the power law is flagged as a poor fit.
const POOR_FIT_DISTANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TailFit {
    pub exponent: f64,
    pub xmin: usize,
    pub tail_size: usize,
    /// Largest gap between the empirical and fitted tail survival functions.
    pub ks_distance: f64,
    pub poor_fit: bool,
}

pub fn indegree_tail_exponent(g: &DirectedGraph) -> Result<TailFit> {
    indegree_tail_exponent_with(g, DEFAULT_XMIN)
}

/// Maximum-likelihood power-law exponent of the in-degrees at or above
/// `xmin`, using the discrete approximation `1 + n / sum(ln(x / (xmin - 1/2)))`.
pub fn indegree_tail_exponent_with(g: &DirectedGraph, xmin: usize) -> Result<TailFit> {
    if xmin == 0 {
        return Err(Error::InvalidConfig("xmin must be positive".into()));
    }
    let degrees: Vec<usize> = (0..g.node_count()).map(|v| g.in_degree_ix(v, Scope::Whole)).collect();
    let nonzero = degrees.iter().filter(|&&d| d > 0).count();
    if nonzero < MIN_NONZERO {
        return Err(Error::TooFewSamples { needed: MIN_NONZERO, got: nonzero });
    }
    let mut tail: Vec<usize> = degrees.into_iter().filter(|&d| d >= xmin).collect();
    tail.sort_unstable();
    let mut distinct = tail.clone();
    distinct.dedup();
    if tail.len() < MIN_TAIL || distinct.len() < 2 {
        return Err(Error::NoTail { samples: tail.len(), distinct: distinct.len() });
    }
    let shift = xmin as f64 - 0.5;
    let n = tail.len() as f64;
    let log_sum: f64 = tail.iter().map(|&x| math::ln(x as f64 / shift)).sum();
    let exponent = 1.0 + n / log_sum;

    let mut ks: f64 = 0.0;
    let mut i = 0;
    for &x in &distinct {
        while tail[i] < x {
            i += 1;
        }
        let empirical = (tail.len() - i) as f64 / n;
        let model = math::powf((x as f64 - 0.5) / shift, 1.0 - exponent);
        ks = ks.max((empirical - model).abs());
    }
    Ok(TailFit { exponent, xmin, tail_size: tail.len(), ks_distance: ks, poor_fit: ks > POOR_FIT_DISTANCE })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeRecord;
    use crate::synth::{generate, SynthConfig};
    use alloc::format;
    use rand::Rng;

    fn with_in_degrees(degrees: &[usize]) -> DirectedGraph {
        let n = degrees.len();
        let pool = degrees.iter().copied().max().unwrap_or(0) + 1;
        let mut edges = Vec::new();
        for (v, &d) in degrees.iter().enumerate() {
            for s in 0..d {
                edges.push((n + s, v));
            }
        }
        let nodes = (0..n + pool).map(|i| NodeRecord::artist(format!("{i}"))).collect();
        DirectedGraph::from_indexed(nodes, &edges).0
    }

    #[test]
    fn linear_attachment_tail_is_scale_free() {
        for seed in 0..10 {
            let g = generate(&SynthConfig { n_nodes: 2000, seed, ..Default::default() }).unwrap();
            let fit = indegree_tail_exponent(&g).unwrap();
            assert!((2.0..=4.0).contains(&fit.exponent), "seed {seed}: {fit:?}");
        }
    }

    #[test]
    fn uniform_degrees_are_not_a_good_power_law() {
        let mut rng = crate::rng::seeded(8);
        for _ in 0..5 {
            let degrees: Vec<usize> = (0..500).map(|_| rng.random_range(1..=20)).collect();
            let fit = indegree_tail_exponent(&with_in_degrees(&degrees)).unwrap();
            assert!(fit.poor_fit || !(2.0..=4.0).contains(&fit.exponent), "{fit:?}");
        }
    }

    #[test]
    fn matches_closed_form() {
        let mut degrees = alloc::vec![1usize; 100];
        degrees.extend([5, 6, 8, 10, 12, 15, 20, 30, 50, 90, 5, 5]);
        let fit = indegree_tail_exponent(&with_in_degrees(&degrees)).unwrap();
        let tail: Vec<f64> = degrees.iter().filter(|&&d| d >= 5).map(|&d| d as f64).collect();
        let expected = 1.0 + tail.len() as f64 / tail.iter().map(|x| (x / 4.5).ln()).sum::<f64>();
        assert!((fit.exponent - expected).abs() < 1e-12);
        assert_eq!(fit.tail_size, 12);
    }

    #[test]
    fn degenerate_degrees_rejected() {
        assert!(matches!(
            indegree_tail_exponent(&with_in_degrees(&[3; 200])),
            Err(Error::NoTail { samples: 0, .. })
        ));
        assert!(matches!(
            indegree_tail_exponent(&with_in_degrees(&[7; 200])),
            Err(Error::NoTail { distinct: 1, .. })
        ));
        assert!(matches!(
            indegree_tail_exponent(&with_in_degrees(&[9; 20])),
            Err(Error::TooFewSamples { .. })
        ));
    }
}
