use alloc::vec::Vec;

use super::{kmeans, select_k, Selection};
use crate::som::{CellIndex, SomMap};
use crate::{math, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ClusterCount {
    Fixed(usize),
    /// BIC scan over `min..=max`, clipped to the cell count.
    Auto { min: usize, max: usize },
}

/// What each cell contributes to k-means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CellFeatures {
    /// The cell's prototype vector.
    #[default]
    Prototypes,
    /// The cell's row of the prototype distance matrix.
    DistanceRows,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub k: usize,
    /// Cluster per cell, row-major.
    pub cell_assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Cluster per entity, inherited from its cell.
    pub entity_assignments: Vec<usize>,
    pub selection: Option<Selection>,
}

impl ClusterModel {
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = alloc::vec![0; self.k];
        for &a in &self.entity_assignments {
            s[a] += 1;
        }
        s
    }
}

const RESTARTS: usize = 10;

/// k-means over the map cells; entities take the cluster of their cell.
pub fn cluster_cells(
    map: &SomMap,
    entity_cells: &[CellIndex],
    count: ClusterCount,
    features: CellFeatures,
    seed: u64,
) -> Result<ClusterModel> {
    let dims = map.dims();
    for &c in entity_cells {
        dims.check(c)?;
    }
    let protos = map.prototype_vectors();
    let vectors: Vec<Vec<f64>> = match features {
        CellFeatures::Prototypes => protos,
        CellFeatures::DistanceRows => {
            protos.iter().map(|a| protos.iter().map(|b| math::dist(a, b)).collect()).collect()
        }
    };
    let (k, selection) = match count {
        ClusterCount::Fixed(k) => (k, None),
        ClusterCount::Auto { min, max } => {
            let hi = max.min(vectors.len());
            let lo = min.max(1);
            if lo > hi {
                return Err(Error::InvalidConfig(alloc::format!("empty cluster range {min}..={max}")));
            }
            let candidates: Vec<usize> = (lo..=hi).collect();
            let sel = select_k(&vectors, &candidates, seed)?;
            (sel.k, Some(sel))
        }
    };
    let fit = kmeans(&vectors, k, seed, RESTARTS)?;
    let entity_assignments = entity_cells.iter().map(|c| fit.assignments[c.linear(dims.cols)]).collect();
    Ok(ClusterModel {
        k,
        cell_assignments: fit.assignments,
        centroids: fit.centroids,
        entity_assignments,
        selection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::som::SomConfig;
    use alloc::format;
    use alloc::vec;

    fn map_with(rows: usize, cols: usize, protos: Vec<Vec<f64>>) -> SomMap {
        let dim = protos[0].len();
        SomMap::from_parts(
            SomConfig::new(rows, cols),
            (0..dim).map(|i| format!("f{i}")).collect(),
            vec![Vec::new(); dim],
            protos.concat(),
        )
        .unwrap()
    }

    #[test]
    fn one_cluster_per_cell() {
        let protos: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, 0.5 * i as f64]).collect();
        let map = map_with(2, 3, protos);
        let cells: Vec<CellIndex> = map.dims().iter().collect();
        let m = cluster_cells(&map, &cells, ClusterCount::Fixed(6), CellFeatures::Prototypes, 1).unwrap();
        assert_eq!(m.entity_assignments, (0..6).collect::<Vec<_>>());
        assert_eq!(m.cell_assignments, m.entity_assignments);
    }

    #[test]
    fn identical_prototypes_single_cluster() {
        let map = map_with(2, 2, vec![vec![1.0, 1.0]; 4]);
        let cells = vec![CellIndex::new(1, 1), CellIndex::new(0, 0)];
        let m = cluster_cells(&map, &cells, ClusterCount::Fixed(1), CellFeatures::Prototypes, 0).unwrap();
        assert_eq!(m.cell_assignments, vec![0; 4]);
        assert_eq!(m.sizes(), vec![2]);
    }

    #[test]
    fn distance_rows_mode_separates_halves() {
        // left column near 0, right column near 10
        let protos: Vec<Vec<f64>> =
            (0..8).map(|i| if i % 2 == 0 { vec![0.1 * i as f64] } else { vec![10.0 + 0.1 * i as f64] }).collect();
        let map = map_with(4, 2, protos);
        let cells: Vec<CellIndex> = map.dims().iter().collect();
        for mode in [CellFeatures::Prototypes, CellFeatures::DistanceRows] {
            let m = cluster_cells(&map, &cells, ClusterCount::Fixed(2), mode, 3).unwrap();
            assert_eq!(m.cell_assignments, vec![0, 1, 0, 1, 0, 1, 0, 1]);
        }
    }

    #[test]
    fn out_of_bounds_entity_cell() {
        let map = map_with(1, 2, vec![vec![0.0], vec![1.0]]);
        let err = cluster_cells(&map, &[CellIndex::new(3, 0)], ClusterCount::Fixed(1), CellFeatures::Prototypes, 0);
        assert!(matches!(err, Err(Error::CellOutOfBounds { .. })));
    }
}
