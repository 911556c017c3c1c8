//! Pipeline configuration: a JSON or TOML document, with any field
//! overridable by dotted path.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use socmap_core::clustering::{CellFeatures, ClusterCount};
use socmap_core::features::InDegreeSource;
use socmap_core::layout::{LayoutConfig, PartitionCount};
use socmap_core::som::{grid_dims, Init, SomConfig};
use socmap_core::synth::SynthConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PageRankGraph {
    #[default]
    Artist,
    Whole,
}

/// Optional replacements for the population-sized SOM defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SomOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lr_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lr_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<Init>,
}

impl SomOverrides {
    /// Config for `population` training rows.
    pub fn resolve(&self, population: usize, seed: u64) -> SomConfig {
        let auto = grid_dims(population.max(1));
        let rows = self.rows.unwrap_or(auto.rows);
        let cols = self.cols.unwrap_or(auto.cols);
        let mut c = SomConfig::new(rows, cols).with_seed(seed);
        if let Some(e) = self.epochs {
            c.epochs = e;
        }
        if let Some(v) = self.lr_start {
            c.lr_start = v;
        }
        if let Some(v) = self.lr_end {
            c.lr_end = v;
        }
        if let Some(v) = self.radius_start {
            c.radius_start = v;
        }
        if let Some(v) = self.radius_end {
            c.radius_end = v;
        }
        if let Some(i) = self.init {
            c.init = i;
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterSpec {
    /// Fixed cluster count; when absent the count is chosen by BIC.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub k_min: usize,
    pub k_max: usize,
    pub cell_features: CellFeatures,
}

impl Default for ClusterSpec {
    fn default() -> Self {
        ClusterSpec { k: None, k_min: 2, k_max: 10, cell_features: CellFeatures::Prototypes }
    }
}

impl ClusterSpec {
    pub fn count(&self) -> ClusterCount {
        match self.k {
            Some(k) => ClusterCount::Fixed(k),
            None => ClusterCount::Auto { min: self.k_min, max: self.k_max },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutSpec {
    pub iterations: usize,
    pub step_start: f64,
    pub step_end: f64,
    pub epsilon: f64,
    /// Fixed partition count; when absent it maximizes the silhouette.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partitions: Option<usize>,
}

impl Default for LayoutSpec {
    fn default() -> Self {
        let d = LayoutConfig::default();
        LayoutSpec {
            iterations: d.iterations,
            step_start: d.step_start,
            step_end: d.step_end,
            epsilon: d.epsilon,
            partitions: None,
        }
    }
}

impl LayoutSpec {
    pub fn resolve(&self, seed: u64) -> LayoutConfig {
        LayoutConfig {
            iterations: self.iterations,
            step_start: self.step_start,
            step_end: self.step_end,
            epsilon: self.epsilon,
            seed,
        }
    }

    pub fn partition_count(&self) -> PartitionCount {
        self.partitions.map_or(PartitionCount::Auto, PartitionCount::Fixed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthConfig>,
    pub alpha: f64,
    /// Monte Carlo replicates for the normality null distribution.
    pub null_replicates: usize,
    pub pagerank_graph: PageRankGraph,
    pub edge_in_degree: InDegreeSource,
    pub node_som: SomOverrides,
    pub edge_som: SomOverrides,
    pub clusters: ClusterSpec,
    pub elite_percentile: f64,
    pub layout: LayoutSpec,
    #[serde(skip_serializing_if = "path_is_empty")]
    pub output: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            nodes: None,
            edges: None,
            synth: None,
            alpha: 0.01,
            null_replicates: 10_000,
            pagerank_graph: PageRankGraph::Artist,
            edge_in_degree: InDegreeSource::Artist,
            node_som: SomOverrides::default(),
            edge_som: SomOverrides::default(),
            clusters: ClusterSpec::default(),
            elite_percentile: 0.01,
            layout: LayoutSpec::default(),
            output: PathBuf::from("out"),
            seed: None,
        }
    }
}

fn path_is_empty(p: &Path) -> bool {
    p.as_os_str().is_empty()
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml")) {
            toml::from_str(&text).with_context(|| format!("parsing TOML config {}", path.display()))?
        } else {
            serde_json::from_str(&text).with_context(|| format!("parsing JSON config {}", path.display()))?
        };
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let files = self.nodes.is_some() || self.edges.is_some();
        match (files, self.synth.is_some()) {
            (true, true) => bail!("give either input files or a synth section, not both"),
            (false, false) => bail!("give input files (nodes and edges) or a synth section"),
            (true, false) if self.nodes.is_none() || self.edges.is_none() => {
                bail!("both nodes and edges files are required")
            }
            _ => {}
        }
        if !(self.elite_percentile > 0.0 && self.elite_percentile < 1.0) {
            bail!("elite_percentile must lie strictly between 0 and 1");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            bail!("alpha must lie strictly between 0 and 1");
        }
        if self.null_replicates == 0 {
            bail!("null_replicates must be positive");
        }
        if let Some(s) = &self.synth {
            s.validate()?;
        }
        if self.clusters.k.is_none() && (self.clusters.k_min == 0 || self.clusters.k_min > self.clusters.k_max) {
            bail!("cluster range must satisfy 1 <= k_min <= k_max");
        }
        Ok(())
    }

    /// Sets the field at a dotted path such as `node_som.epochs` from a
    /// JSON literal; bare words are taken as strings.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (path, raw) = assignment.split_once('=').with_context(|| format!("expected key=value, got `{assignment}`"))?;
        let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut doc = serde_json::to_value(&*self)?;
        let mut slot = &mut doc;
        for key in path.split('.') {
            let obj = match slot {
                Value::Object(m) => m,
                Value::Null => {
                    *slot = Value::Object(Default::default());
                    slot.as_object_mut().expect("just created")
                }
                _ => bail!("`{path}` does not name a config field"),
            };
            slot = obj.entry(key.to_string()).or_insert(Value::Null);
        }
        *slot = value;
        *self = serde_json::from_value(doc).with_context(|| format!("invalid value for `{path}`"))?;
        Ok(())
    }
}
