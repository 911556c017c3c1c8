//! Synthetic directed scale-free graphs with attributes shaped like an
//! artist/fan social network: preferential attachment, injected
//! reciprocity, lognormal popularity counters and categorical labels.

mod tail;

pub use tail::{indegree_tail_exponent, indegree_tail_exponent_with, TailFit, DEFAULT_XMIN};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Geometric, StandardNormal};

use crate::graph::{DirectedGraph, NodeRecord, MAX_FRIENDS};
use crate::{math, rng, Error, Result};

pub const LABELS: [&str; 3] = ["other", "indie", "major"];

/// Distance from the reciprocity target the final pass must reach.
pub const RECIPROCITY_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogNormalParams {
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SynthConfig {
    pub n_nodes: usize,
    pub artist_fraction: f64,
    pub out_degree_min: usize,
    pub out_degree_max: usize,
    /// Mean of the (truncated) geometric out-degree draw.
    pub out_degree_mean: f64,
    pub attachment_exponent: f64,
    pub reciprocity: f64,
    /// Shares of `other`, `indie`, `major` labels among artists.
    pub label_mix: [f64; 3],
    pub genre_count: usize,
    pub hits: LogNormalParams,
    pub comments: LogNormalParams,
    /// Added to the log-mean per unit of `ln(1 + in-degree)`.
    pub degree_coupling: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_nodes: 2000,
            artist_fraction: 0.5,
            out_degree_min: 1,
            out_degree_max: MAX_FRIENDS,
            out_degree_mean: 7.0,
            attachment_exponent: 1.0,
            reciprocity: 0.4,
            label_mix: [0.25, 0.5, 0.25],
            genre_count: 8,
            hits: LogNormalParams { mu: 7.0, sigma: 1.5 },
            comments: LogNormalParams { mu: 3.0, sigma: 1.2 },
            degree_coupling: 0.8,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.n_nodes < 2 {
            return bad("n_nodes must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.artist_fraction) {
            return bad("artist_fraction must lie in [0, 1]");
        }
        if self.out_degree_min == 0 || self.out_degree_min > self.out_degree_max {
            return bad("out-degree range must satisfy 1 <= min <= max");
        }
        if self.out_degree_max > MAX_FRIENDS {
            return bad("out_degree_max cannot exceed 40");
        }
        if !(self.out_degree_mean >= self.out_degree_min as f64) {
            return bad("out_degree_mean must be at least out_degree_min");
        }
        if !self.attachment_exponent.is_finite() || self.attachment_exponent < 0.0 {
            return bad("attachment_exponent must be finite and non-negative");
        }
        if !(self.reciprocity >= 0.0) {
            return bad("reciprocity must be non-negative");
        }
        if self.reciprocity > 1.0 {
            return Err(Error::InfeasibleReciprocity(self.reciprocity));
        }
        if self.label_mix.iter().any(|p| !(0.0..=1.0).contains(p))
            || (self.label_mix.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return bad("label_mix must be three fractions summing to 1");
        }
        if self.genre_count == 0 {
            return bad("genre_count must be positive");
        }
        for p in [self.hits, self.comments] {
            if !p.mu.is_finite() || !(p.sigma >= 0.0) || !p.sigma.is_finite() {
                return bad("lognormal parameters must be finite with sigma >= 0");
            }
        }
        if !self.degree_coupling.is_finite() {
            return bad("degree_coupling must be finite");
        }
        Ok(())
    }
}

/// Prefix sums over non-negative weights with point updates and
/// inverse-CDF lookup.
struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick { tree: alloc::vec![0.0; n + 1] }
    }

    fn add(&mut self, ix: usize, delta: f64) {
        let mut i = ix + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    fn prefix(&self, count: usize) -> f64 {
        let (mut i, mut s) = (count, 0.0);
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`.
    fn find(&self, mut target: f64, len: usize) -> usize {
        let mut pos = 0;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos.min(len - 1)
    }
}

fn node_id(i: usize, width: usize) -> String {
    format!("u{i:0width$}")
}

/// Generates a graph according to `cfg`. Node ids are `u` followed by the
/// zero-padded creation index.
pub fn generate(cfg: &SynthConfig) -> Result<DirectedGraph> {
    cfg.validate()?;
    let n = cfg.n_nodes;
    let width = format!("{}", n - 1).len();
    let edges = wire(cfg)?;
    let (g, _) = DirectedGraph::from_indexed(
        (0..n).map(|i| NodeRecord::fan(node_id(i, width))).collect(),
        &edges,
    );
    let mut nodes = g.nodes().to_vec();
    decorate(cfg, &g, &mut nodes)?;
    Ok(DirectedGraph::from_indexed(nodes, &edges).0)
}

fn wire(cfg: &SynthConfig) -> Result<Vec<(usize, usize)>> {
    let n = cfg.n_nodes;
    let mut rng = rng::seeded(rng::derive(cfg.seed, 0));
    let weight = |indeg: usize| math::powf(indeg as f64 + 1.0, cfg.attachment_exponent);
    let core = (cfg.out_degree_min + 1).min(n);
    let mut indeg = alloc::vec![0usize; n];
    let mut out = alloc::vec![0usize; n];
    let mut edges = Vec::new();
    for a in 0..core {
        for b in 0..core {
            if a != b {
                edges.push((a, b));
                indeg[b] += 1;
                out[a] += 1;
            }
        }
    }
    let mut fen = Fenwick::new(n);
    for (v, &d) in indeg.iter().enumerate().take(core) {
        fen.add(v, weight(d));
    }
    let extra = Geometric::new(1.0 / (cfg.out_degree_mean - cfg.out_degree_min as f64 + 1.0))
        .map_err(|e| Error::InvalidConfig(format!("out-degree distribution: {e}")))?;
    let mut chosen = Vec::with_capacity(cfg.out_degree_max);
    for v in core..n {
        let draw = cfg.out_degree_min as u64 + extra.sample(&mut rng);
        let m = (draw as usize).min(cfg.out_degree_max).min(v);
        chosen.clear();
        for _ in 0..m {
            let total = fen.prefix(v);
            let t = fen.find(rng.random::<f64>() * total, v);
            chosen.push(t);
            fen.add(t, -weight(indeg[t]));
        }
        for &t in &chosen {
            edges.push((v, t));
            indeg[t] += 1;
            fen.add(t, weight(indeg[t]));
        }
        out[v] = m;
        fen.add(v, weight(0));
    }
    add_reciprocal_edges(cfg, &mut edges, &mut out)?;
    Ok(edges)
}

/// Adds reverse edges for randomly chosen one-way edges until the share of
/// reciprocated edges reaches the target, never pushing an out-degree past
/// the configured maximum.
fn add_reciprocal_edges(cfg: &SynthConfig, edges: &mut Vec<(usize, usize)>, out: &mut [usize]) -> Result<()> {
    let mut sorted = edges.clone();
    sorted.sort_unstable();
    let present = |s: &[(usize, usize)], e: (usize, usize)| s.binary_search(&e).is_ok();
    let reciprocal = edges.iter().filter(|&&(a, b)| present(&sorted, (b, a))).count();
    let total = edges.len();
    let current = reciprocal as f64 / total as f64;
    let t = cfg.reciprocity;
    if current > t + RECIPROCITY_TOLERANCE {
        return Err(Error::InfeasibleReciprocity(t));
    }
    // each added reverse edge turns one one-way edge into a pair: R += 2, E += 1
    let needed = math::ceil(((t * total as f64 - reciprocal as f64) / (2.0 - t)).max(0.0)) as usize;
    let mut one_way: Vec<(usize, usize)> =
        edges.iter().copied().filter(|&(a, b)| !present(&sorted, (b, a))).collect();
    one_way.shuffle(&mut rng::seeded(rng::derive(cfg.seed, 1)));
    let mut added = 0;
    for (a, b) in one_way {
        if added == needed {
            break;
        }
        if out[b] < cfg.out_degree_max {
            edges.push((b, a));
            out[b] += 1;
            added += 1;
        }
    }
    let realized = (reciprocal + 2 * added) as f64 / (total + added) as f64;
    if (realized - t).abs() > RECIPROCITY_TOLERANCE {
        return Err(Error::InfeasibleReciprocity(t));
    }
    Ok(())
}

fn decorate(cfg: &SynthConfig, g: &DirectedGraph, nodes: &mut [NodeRecord]) -> Result<()> {
    let mut rng = rng::seeded(rng::derive(cfg.seed, 2));
    let genre_width = format!("{}", cfg.genre_count - 1).len();
    for (i, node) in nodes.iter_mut().enumerate() {
        let shift = cfg.degree_coupling * math::ln_1p(g.predecessors(i).len() as f64);
        let counter = |p: LogNormalParams, rng: &mut rng::Rng| {
            let z: f64 = StandardNormal.sample(rng);
            let x = math::round(math::exp(p.mu + shift + p.sigma * z));
            if x.is_finite() { x.min(u64::MAX as f64) as u64 } else { u64::MAX }
        };
        node.hits = counter(cfg.hits, &mut rng);
        node.comments = counter(cfg.comments, &mut rng);
        node.is_artist = rng.random::<f64>() < cfg.artist_fraction;
        if node.is_artist {
            let u: f64 = rng.random();
            let label = if u < cfg.label_mix[0] {
                0
            } else if u < cfg.label_mix[0] + cfg.label_mix[1] {
                1
            } else {
                2
            };
            node.label = LABELS[label].into();
            node.genre = format!("genre{:0genre_width$}", rng.random_range(0..cfg.genre_count));
        }
    }
    Ok(())
}
