//! The `report.json` document.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use socmap_core::clustering::EliteDistribution;

use crate::config::PipelineConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub dataset: DatasetSummary,
    pub node_som: NodeSomSummary,
    pub edge_som: EdgeSomSummary,
    pub density: DensitySummary,
    pub elites: EliteSummary,
    pub inter_clique: InterCliqueSummary,
    pub provenance: Provenance,
}

/// Profile, artist and link counts of the analysed network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub profiles: usize,
    pub artists: usize,
    pub links: usize,
    pub artist_links: usize,
    /// Share of links whose reverse link exists.
    pub reciprocal_rate: f64,
    pub artist_reciprocal_rate: f64,
    /// Artists per label: `major`, `indie`, `other`.
    pub labels: BTreeMap<String, usize>,
    /// Input rows dropped as self-loops or duplicates.
    pub dropped_edge_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMean {
    pub column: String,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    /// 1-based cluster id.
    pub cluster: usize,
    pub cells: usize,
    pub members: usize,
    /// Member means in original feature units.
    pub feature_means: Vec<FeatureMean>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BicScore {
    pub k: usize,
    pub bic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedK {
    pub k: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSelection {
    pub scores: Vec<BicScore>,
    pub skipped: Vec<SkippedK>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSomSummary {
    pub rows: usize,
    pub cols: usize,
    pub quantization_error: f64,
    /// Columns that went through the log transform.
    pub log_transformed: Vec<String>,
    pub cluster_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<ClusterSelection>,
    pub clusters: Vec<ClusterSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSomSummary {
    pub rows: usize,
    pub cols: usize,
    pub edges: usize,
    pub quantization_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySummary {
    pub k: usize,
    /// `counts[i][j]`: links from cluster `i + 1` to cluster `j + 1`.
    pub counts: Vec<Vec<u64>>,
    pub normalized: Vec<Vec<f64>>,
    /// 1-based ids of clusters that emit no links.
    pub empty_rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliteSummary {
    pub percentile: f64,
    /// Label mix of the top artists by page hits.
    pub audience: EliteDistribution,
    /// Label mix of the top artists by whole-network in-degree.
    pub influence: EliteDistribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliqueRow {
    pub cluster: usize,
    pub emitted: u64,
    pub inter: u64,
    pub fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterCliqueSummary {
    pub partitions: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub silhouette: Option<f64>,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub clusters: Vec<CliqueRow>,
    pub global_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub stage_seeds: BTreeMap<String, u64>,
    pub config: PipelineConfig,
    pub version: String,
}
