//! Node and link feature spaces.
//!
//! Node rows carry seven popularity variables per artist; link rows carry
//! seven variables per directed artist-to-artist edge. Every column keeps
//! the list of transforms applied to it so map planes can be read back in
//! original units.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::graph::{DirectedGraph, Scope};
use crate::stats::{log_gate_with, LillieforsConfig, LillieforsNull};
use crate::{math, Error, Result};

pub const NODE_COLUMNS: [&str; 7] =
    ["hits", "comments", "indeg_whole", "indeg_artist", "pagerank", "reciprocity", "label"];

pub const EDGE_COLUMNS: [&str; 7] = [
    "hits_grad",
    "comments_grad",
    "indeg_grad",
    "common_pred",
    "common_succ",
    "genre_same",
    "reciprocal",
];

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Transform {
    Log1p,
    Zscore { mean: f64, sd: f64 },
}

impl Transform {
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Transform::Log1p => math::ln_1p(x),
            Transform::Zscore { mean, sd } => (x - mean) / sd,
        }
    }

    pub fn invert(&self, y: f64) -> f64 {
        match *self {
            Transform::Log1p => math::exp_m1(y),
            Transform::Zscore { mean, sd } => y * sd + mean,
        }
    }
}

/// Undoes a transform chain (applied in order) on one value.
pub fn invert_chain(chain: &[Transform], value: f64) -> f64 {
    chain.iter().rev().fold(value, |v, t| t.invert(v))
}

/// Dense entity-by-feature table.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureMatrix {
    ids: Vec<String>,
    columns: Vec<String>,
    values: Vec<f64>,
    transforms: Vec<Vec<Transform>>,
}

impl FeatureMatrix {
    /// `values` is row-major. Every column starts untransformed.
    pub fn new(ids: Vec<String>, columns: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let transforms = alloc::vec![Vec::new(); columns.len()];
        Self::with_transforms(ids, columns, values, transforms)
    }

    pub fn with_transforms(
        ids: Vec<String>,
        columns: Vec<String>,
        values: Vec<f64>,
        transforms: Vec<Vec<Transform>>,
    ) -> Result<Self> {
        let expected = ids.len() * columns.len();
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: values.len() });
        }
        if transforms.len() != columns.len() {
            return Err(Error::DimensionMismatch { expected: columns.len(), got: transforms.len() });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(alloc::format!("non-finite feature value {bad}")));
        }
        Ok(FeatureMatrix { ids, columns, values, transforms })
    }

    pub fn from_rows(ids: Vec<String>, columns: &[&str], rows: &[Vec<f64>]) -> Result<Self> {
        let mut values = Vec::with_capacity(rows.len() * columns.len());
        for r in rows {
            if r.len() != columns.len() {
                return Err(Error::DimensionMismatch { expected: columns.len(), got: r.len() });
            }
            values.extend_from_slice(r);
        }
        Self::new(ids, columns.iter().map(|c| c.to_string()).collect(), values)
    }

    pub fn n_rows(&self) -> usize {
        self.ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.n_cols();
        &self.values[i * c..(i + 1) * c]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_cols() + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|r| self.get(r, col)).collect()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns.iter().position(|c| c == name).ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn transforms(&self, col: usize) -> &[Transform] {
        &self.transforms[col]
    }

    pub fn all_transforms(&self) -> &[Vec<Transform>] {
        &self.transforms
    }

    /// Maps a stored value of `col` back to original units.
    pub fn to_original(&self, col: usize, value: f64) -> f64 {
        invert_chain(&self.transforms[col], value)
    }

    /// Standardizes the selected columns (sample sd) and records the
    /// `(mean, sd)` used.
    pub fn zscore(&self, cols: &[usize]) -> Result<FeatureMatrix> {
        let mut out = self.clone();
        let c = self.n_cols();
        for &j in cols {
            if j >= c {
                return Err(Error::UnknownColumn(alloc::format!("#{j}")));
            }
            let col = self.column(j);
            let mean = math::mean(&col);
            let sd = math::sample_sd(&col, mean);
            if col.iter().all(|&v| v == col[0]) || !(sd > 0.0) {
                return Err(Error::ConstantColumn(self.columns[j].clone()));
            }
            let t = Transform::Zscore { mean, sd };
            for r in 0..self.n_rows() {
                out.values[r * c + j] = t.apply(col[r]);
            }
            out.transforms[j].push(t);
        }
        Ok(out)
    }

    pub fn zscore_all(&self) -> Result<FeatureMatrix> {
        let cols: Vec<usize> = (0..self.n_cols()).collect();
        self.zscore(&cols)
    }
}

/// Ordinal record-label code: Major = 3, Indie = 2, anything else = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LabelCode {
    Other = 1,
    Indie = 2,
    Major = 3,
}

impl LabelCode {
    pub fn value(self) -> u8 {
        self as u8
    }
}

pub fn encode_label(label: &str) -> LabelCode {
    let l = label.trim();
    if l.eq_ignore_ascii_case("major") {
        LabelCode::Major
    } else if l.eq_ignore_ascii_case("indie") {
        LabelCode::Indie
    } else {
        LabelCode::Other
    }
}

/// Normalized difference `(receiver - emitter) / (receiver + emitter)`,
/// zero when both are zero.
pub fn gradient(receiver: f64, emitter: f64) -> Result<f64> {
    for v in [receiver, emitter] {
        if !(v >= 0.0) {
            return Err(Error::NegativeValue { context: "gradient input", value: v });
        }
    }
    let sum = receiver + emitter;
    if sum == 0.0 {
        return Ok(0.0);
    }
    Ok((receiver - emitter) / sum)
}

/// Options for building the node feature table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateConfig {
    pub alpha: f64,
    pub lilliefors: LillieforsConfig,
}

impl Default for GateConfig {
    fn default() -> Self {
        GateConfig { alpha: 0.01, lilliefors: LillieforsConfig::default() }
    }
}

/// Seven-variable artist table in the fixed [`NODE_COLUMNS`] order.
///
/// Hits, comments and both in-degrees go through the log gate. In-degree
/// on the whole network comes from `g_whole`; everything else is measured
/// on the artist graph. Rows follow `g_artist` node order.
pub fn node_features(
    g_whole: &DirectedGraph,
    g_artist: &DirectedGraph,
    pagerank: &BTreeMap<String, f64>,
    gate: &GateConfig,
) -> Result<FeatureMatrix> {
    let n = g_artist.node_count();
    let mut raw: [Vec<f64>; 7] = Default::default();
    for (i, node) in g_artist.nodes().iter().enumerate() {
        let pr = *pagerank.get(&node.id).ok_or_else(|| Error::MissingScore(node.id.clone()))?;
        let whole_ix = g_whole.ix(&node.id)?;
        raw[0].push(node.hits as f64);
        raw[1].push(node.comments as f64);
        raw[2].push(g_whole.in_degree_ix(whole_ix, Scope::Whole) as f64);
        raw[3].push(g_artist.in_degree_ix(i, Scope::Whole) as f64);
        raw[4].push(pr);
        raw[5].push(g_artist.reciprocity_rate_ix(i));
        raw[6].push(encode_label(&node.label).value() as f64);
    }
    let mut transforms = alloc::vec![Vec::new(); 7];
    if n >= 5 {
        let null = LillieforsNull::simulate(n, &gate.lilliefors)?;
        for j in 0..4 {
            let gated = log_gate_with(&null, &raw[j], gate.alpha)?;
            if gated.applied {
                transforms[j].push(Transform::Log1p);
            }
            raw[j] = gated.values;
        }
    }
    let mut values = Vec::with_capacity(n * 7);
    for i in 0..n {
        values.extend(raw.iter().map(|c| c[i]));
    }
    FeatureMatrix::with_transforms(
        g_artist.nodes().iter().map(|n| n.id.clone()).collect(),
        NODE_COLUMNS.iter().map(|c| c.to_string()).collect(),
        values,
        transforms,
    )
}

/// Raw node measurements the link gradients are taken over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeAttrs {
    pub hits: f64,
    pub comments: f64,
    pub indeg: f64,
}

/// Which in-degree feeds the influence gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InDegreeSource {
    #[default]
    Artist,
    Whole,
}

/// Per-artist attributes keyed by id.
pub fn node_attrs(
    g_whole: &DirectedGraph,
    g_artist: &DirectedGraph,
    source: InDegreeSource,
) -> Result<BTreeMap<String, NodeAttrs>> {
    let mut out = BTreeMap::new();
    for (i, node) in g_artist.nodes().iter().enumerate() {
        let indeg = match source {
            InDegreeSource::Artist => g_artist.in_degree_ix(i, Scope::Whole),
            InDegreeSource::Whole => g_whole.in_degree_ix(g_whole.ix(&node.id)?, Scope::Whole),
        };
        out.insert(
            node.id.clone(),
            NodeAttrs { hits: node.hits as f64, comments: node.comments as f64, indeg: indeg as f64 },
        );
    }
    Ok(out)
}

fn same_genre(a: &str, b: &str) -> bool {
    let (a, b) = (a.trim(), b.trim());
    a.len() == b.len() && a.chars().zip(b.chars()).all(|(x, y)| x.to_lowercase().eq(y.to_lowercase()))
}

/// One row per directed edge of `g`, in [`EDGE_COLUMNS`] order. Row ids
/// are `emitter->receiver`.
pub fn edge_features(g: &DirectedGraph, attrs: &BTreeMap<String, NodeAttrs>) -> Result<FeatureMatrix> {
    let lookup = |ix: usize| {
        let id = &g.node(ix).id;
        attrs.get(id).ok_or_else(|| Error::MissingAttributes(id.clone()))
    };
    let mut ids = Vec::with_capacity(g.edge_count());
    let mut values = Vec::with_capacity(g.edge_count() * 7);
    for (e, r) in g.edges() {
        let (ae, ar) = (lookup(e)?, lookup(r)?);
        ids.push(alloc::format!("{}->{}", g.node(e).id, g.node(r).id));
        values.extend_from_slice(&[
            gradient(ar.hits, ae.hits)?,
            gradient(ar.comments, ae.comments)?,
            gradient(ar.indeg, ae.indeg)?,
            g.common_predecessors_ix(e, r) as f64,
            g.common_successors_ix(e, r) as f64,
            same_genre(&g.node(e).genre, &g.node(r).genre) as u8 as f64,
            g.has_edge(r, e) as u8 as f64,
        ]);
    }
    FeatureMatrix::new(ids, EDGE_COLUMNS.iter().map(|c| c.to_string()).collect(), values)
}
