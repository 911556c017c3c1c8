//! Clustering of map cells and the link/label summaries built on the
//! resulting popularity clusters.
//!
//! Cluster ids are 0-based here and numbered by first appearance, so the
//! same partition always gets the same labels.

mod cells;
mod density;
mod elite;
mod gmm;
mod kmeans;

pub use cells::{cluster_cells, CellFeatures, ClusterCount, ClusterModel};
pub use density::{density_matrix, DensityMatrix};
pub use elite::{dominant_category_plane, elite_distribution, EliteDistribution};
pub use gmm::{fit_diagonal_gmm, select_k, GmmFit, Selection};
pub use kmeans::{kmeans, silhouette, KMeansFit};
