//! LinLog (node-repulsion) layout of a graph, partitioning of the
//! resulting coordinates, and per-cluster shares of links that cross
//! partitions.
//!
//! Forces are computed pairwise, O(n^2) per evaluation; that is fine up to
//! a few thousand nodes.

mod partition;

pub use partition::{inter_clique_fraction, spatial_partition, InterClique, Partition, PartitionCount};

use alloc::vec::Vec;

use rand::Rng;

use crate::graph::DirectedGraph;
use crate::{math, rng, Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LayoutConfig {
    pub iterations: usize,
    /// First and last step, as fractions of the layout's RMS radius.
    pub step_start: f64,
    pub step_end: f64,
    /// Distances below this are clamped in the repulsion term.
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig { iterations: 400, step_start: 0.1, step_end: 1e-4, epsilon: 1e-6, seed: 0 }
    }
}

impl LayoutConfig {
    fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("layout needs at least one iteration".into()));
        }
        if !(self.epsilon > 0.0 && self.step_start > 0.0 && self.step_end > 0.0) {
            return Err(Error::InvalidConfig("epsilon and step sizes must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    /// Coordinates aligned with the graph's nodes.
    pub coords: Vec<Point>,
    pub energy: f64,
    pub initial_energy: f64,
    /// Energy after every iteration.
    pub energy_trace: Vec<f64>,
}

/// Unordered node pairs joined by an edge in either direction.
fn undirected_pairs(g: &DirectedGraph) -> Vec<(usize, usize)> {
    g.edges().filter(|&(a, b)| a < b || !g.has_edge(b, a)).map(|(a, b)| (a.min(b), a.max(b))).collect()
}

fn distance(a: Point, b: Point) -> f64 {
    math::hypot(a[0] - b[0], a[1] - b[1])
}

fn sq_distance(a: Point, b: Point) -> f64 {
    let (dx, dy) = (a[0] - b[0], a[1] - b[1]);
    dx * dx + dy * dy
}

fn energy_of(pairs: &[(usize, usize)], coords: &[Point], epsilon: f64) -> f64 {
    let attraction: f64 = pairs.iter().map(|&(a, b)| distance(coords[a], coords[b])).sum();
    let floor = epsilon * epsilon;
    let mut repulsion = 0.0;
    for u in 0..coords.len() {
        for v in (u + 1)..coords.len() {
            repulsion += math::ln(sq_distance(coords[u], coords[v]).max(floor));
        }
    }
    attraction - 0.5 * repulsion
}

/// Sum of edge lengths minus the sum of log distances over all node pairs,
/// with directed edges collapsed to one undirected link.
pub fn linlog_energy(g: &DirectedGraph, coords: &[Point], epsilon: f64) -> Result<f64> {
    if coords.len() != g.node_count() {
        return Err(Error::DimensionMismatch { expected: g.node_count(), got: coords.len() });
    }
    Ok(energy_of(&undirected_pairs(g), coords, epsilon))
}

fn gradient(pairs: &[(usize, usize)], coords: &[Point], epsilon: f64) -> Vec<Point> {
    let n = coords.len();
    let mut grad = alloc::vec![[0.0; 2]; n];
    for &(a, b) in pairs {
        let d = distance(coords[a], coords[b]);
        if d > 0.0 {
            for k in 0..2 {
                let f = (coords[a][k] - coords[b][k]) / d;
                grad[a][k] += f;
                grad[b][k] -= f;
            }
        }
    }
    let floor = epsilon * epsilon;
    for u in 0..n {
        for v in (u + 1)..n {
            let d2 = sq_distance(coords[u], coords[v]);
            if d2 > floor {
                for k in 0..2 {
                    let f = (coords[u][k] - coords[v][k]) / d2;
                    grad[u][k] -= f;
                    grad[v][k] += f;
                }
            }
        }
    }
    grad
}

fn rms_radius(coords: &[Point]) -> f64 {
    let n = coords.len() as f64;
    let cx = coords.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = coords.iter().map(|p| p[1]).sum::<f64>() / n;
    math::sqrt(coords.iter().map(|p| (p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sum::<f64>() / n)
}

/// Gradient descent on the LinLog energy from a seeded random start in the
/// unit square.
///
/// Each iteration moves the node with the largest gradient by the current
/// step (others proportionally); the step shrinks geometrically from
/// `step_start` to `step_end` times the layout radius. A move that raises
/// the energy is retried at half the step, so the energy never increases.
pub fn linlog_layout(g: &DirectedGraph, cfg: &LayoutConfig) -> Result<Layout> {
    cfg.validate()?;
    let n = g.node_count();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let pairs = undirected_pairs(g);
    let mut rng = rng::seeded(cfg.seed);
    let mut coords: Vec<Point> = (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
    separate_coincident(&mut coords, cfg.epsilon, &mut rng);

    let mut energy = energy_of(&pairs, &coords, cfg.epsilon);
    let initial_energy = energy;
    let mut trace = Vec::with_capacity(cfg.iterations);
    let denom = cfg.iterations.saturating_sub(1).max(1) as f64;
    let mut trial = coords.clone();
    for t in 0..cfg.iterations {
        let frac = t as f64 / denom;
        let step = cfg.step_start * math::powf(cfg.step_end / cfg.step_start, frac) * rms_radius(&coords);
        let grad = gradient(&pairs, &coords, cfg.epsilon);
        let gmax = grad.iter().map(|g| math::hypot(g[0], g[1])).fold(0.0, f64::max);
        if gmax > 0.0 && step > 0.0 {
            let mut s = step / gmax;
            for _ in 0..40 {
                for ((p, c), g) in trial.iter_mut().zip(&coords).zip(&grad) {
                    *p = [c[0] - s * g[0], c[1] - s * g[1]];
                }
                let e = energy_of(&pairs, &trial, cfg.epsilon);
                if e <= energy {
                    energy = e;
                    core::mem::swap(&mut coords, &mut trial);
                    break;
                }
                s *= 0.5;
            }
        }
        trace.push(energy);
    }
    Ok(Layout { coords, energy, initial_energy, energy_trace: trace })
}

fn separate_coincident(coords: &mut [Point], epsilon: f64, rng: &mut rng::Rng) {
    for u in 0..coords.len() {
        for v in (u + 1)..coords.len() {
            if distance(coords[u], coords[v]) < epsilon {
                coords[v][0] += epsilon * (1.0 + rng.random::<f64>());
                coords[v][1] += epsilon * (1.0 + rng.random::<f64>());
            }
        }
    }
}
