//! Kohonen self-organizing map on a hexagonal grid.

mod hex;
mod train;

pub use hex::{grid_dims, hex_distance, hex_neighbors, CellIndex, Dims};
pub use train::{train, Init, SomConfig};

use alloc::string::String;
use alloc::vec::Vec;

use crate::features::{invert_chain, FeatureMatrix, Transform};
use crate::{math, Error, Result};

/// Values laid out on the map grid, row-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid<T> {
    pub dims: Dims,
    pub cells: Vec<T>,
}

impl<T> Grid<T> {
    pub fn get(&self, c: CellIndex) -> &T {
        &self.cells[c.linear(self.dims.cols)]
    }

    pub fn iter(&self) -> impl Iterator<Item = (CellIndex, &T)> {
        self.dims.iter().zip(self.cells.iter())
    }
}

pub type UMatrix = Grid<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct SomMap {
    config: SomConfig,
    columns: Vec<String>,
    transforms: Vec<Vec<Transform>>,
    dim: usize,
    prototypes: Vec<f64>,
    trained: bool,
}

impl SomMap {
    /// Reassembles a map from stored parts (e.g. a saved file).
    pub fn from_parts(
        config: SomConfig,
        columns: Vec<String>,
        transforms: Vec<Vec<Transform>>,
        prototypes: Vec<f64>,
    ) -> Result<Self> {
        config.validate()?;
        let dim = columns.len();
        let expected = config.dims().cells() * dim;
        if prototypes.len() != expected || dim == 0 {
            return Err(Error::DimensionMismatch { expected, got: prototypes.len() });
        }
        if transforms.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: transforms.len() });
        }
        Ok(SomMap { config, columns, transforms, dim, prototypes, trained: true })
    }

    pub fn config(&self) -> &SomConfig {
        &self.config
    }

    pub fn dims(&self) -> Dims {
        self.config.dims()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn transforms(&self) -> &[Vec<Transform>] {
        &self.transforms
    }

    pub fn is_trained(&self) -> bool {
        self.trained
    }

    pub fn prototypes(&self) -> &[f64] {
        &self.prototypes
    }

    pub fn prototype(&self, cell: usize) -> &[f64] {
        &self.prototypes[cell * self.dim..(cell + 1) * self.dim]
    }

    pub fn prototype_vectors(&self) -> Vec<Vec<f64>> {
        self.prototypes.chunks(self.dim).map(|c| c.to_vec()).collect()
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: len });
        }
        Ok(())
    }

    /// Linear index and squared distance of the closest prototype; ties go
    /// to the lowest index.
    fn winner_linear(&self, v: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, p) in self.prototypes.chunks(self.dim).enumerate() {
            let d = math::sq_dist(p, v);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    pub fn find_winner(&self, v: &[f64]) -> Result<CellIndex> {
        self.check_dim(v.len())?;
        Ok(CellIndex::from_linear(self.winner_linear(v).0, self.dims().cols))
    }

    pub fn assign(&self, data: &FeatureMatrix) -> Result<Vec<CellIndex>> {
        self.check_dim(data.n_cols())?;
        let cols = self.dims().cols;
        Ok(data.rows().map(|r| CellIndex::from_linear(self.winner_linear(r).0, cols)).collect())
    }

    /// Mean distance from each row to its winning prototype.
    pub fn quantization_error(&self, data: &FeatureMatrix) -> Result<f64> {
        if data.n_rows() == 0 {
            return Err(Error::EmptyInput);
        }
        self.check_dim(data.n_cols())?;
        let total: f64 = data.rows().map(|r| math::sqrt(self.winner_linear(r).1)).sum();
        Ok(total / data.n_rows() as f64)
    }

    /// Mean prototype distance from each cell to its hex neighbours.
    pub fn u_matrix(&self) -> UMatrix {
        let dims = self.dims();
        let cells = dims
            .iter()
            .map(|c| {
                let ns = hex_neighbors(c, dims).expect("cell in bounds");
                if ns.is_empty() {
                    return 0.0;
                }
                let me = self.prototype(c.linear(dims.cols));
                let sum: f64 =
                    ns.iter().map(|n| math::dist(me, self.prototype(n.linear(dims.cols)))).sum();
                sum / ns.len() as f64
            })
            .collect();
        Grid { dims, cells }
    }

    /// One feature's prototype values per cell, mapped back through
    /// `transforms` (the chain the column went through before training).
    pub fn component_plane(&self, column: usize, transforms: &[Transform]) -> Result<Grid<f64>> {
        if column >= self.dim {
            return Err(Error::UnknownColumn(alloc::format!("#{column}")));
        }
        let cells = (0..self.dims().cells())
            .map(|i| invert_chain(transforms, self.prototype(i)[column]))
            .collect();
        Ok(Grid { dims: self.dims(), cells })
    }

    /// [`Self::component_plane`] using the transforms recorded at training.
    pub fn component_plane_original(&self, column: usize) -> Result<Grid<f64>> {
        let chain = self.transforms.get(column).ok_or_else(|| Error::UnknownColumn(alloc::format!("#{column}")))?;
        self.component_plane(column, chain)
    }
}

/// Number of connected groups of equally labelled cells under hex
/// adjacency. Unlabelled cells belong to no group.
pub fn label_regions(dims: Dims, labels: &[Option<usize>]) -> Result<usize> {
    if labels.len() != dims.cells() {
        return Err(Error::DimensionMismatch { expected: dims.cells(), got: labels.len() });
    }
    let mut seen = alloc::vec![false; labels.len()];
    let mut regions = 0;
    let mut stack = Vec::new();
    for start in 0..labels.len() {
        if seen[start] || labels[start].is_none() {
            continue;
        }
        regions += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(ix) = stack.pop() {
            for nb in hex_neighbors(CellIndex::from_linear(ix, dims.cols), dims)? {
                let j = nb.linear(dims.cols);
                if !seen[j] && labels[j] == labels[ix] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    Ok(regions)
}
