//! Hexagonal grid geometry in "odd-r" offset layout: odd rows sit half a
//! cell to the right. Grid distances are hex steps in axial coordinates.

use alloc::vec::Vec;

use crate::{math, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CellIndex {
    pub row: usize,
    pub col: usize,
}

impl CellIndex {
    pub fn new(row: usize, col: usize) -> Self {
        CellIndex { row, col }
    }

    pub fn from_linear(ix: usize, cols: usize) -> Self {
        CellIndex { row: ix / cols, col: ix % cols }
    }

    pub fn linear(&self, cols: usize) -> usize {
        self.row * cols + self.col
    }

    /// Axial `(q, r)` coordinates.
    pub fn axial(&self) -> (i64, i64) {
        let r = self.row as i64;
        let q = self.col as i64 - (r - (r & 1)) / 2;
        (q, r)
    }
}

/// Grid shape `(rows, cols)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dims {
    pub rows: usize,
    pub cols: usize,
}

impl Dims {
    pub fn new(rows: usize, cols: usize) -> Self {
        Dims { rows, cols }
    }

    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }

    pub fn contains(&self, c: CellIndex) -> bool {
        c.row < self.rows && c.col < self.cols
    }

    pub fn check(&self, c: CellIndex) -> Result<()> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(Error::CellOutOfBounds { row: c.row, col: c.col, rows: self.rows, cols: self.cols })
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = CellIndex> {
        let cols = self.cols;
        (0..self.cells()).map(move |i| CellIndex::from_linear(i, cols))
    }
}

/// Squarest `rows x cols` factorization of `cells`, `rows >= cols`.
fn factor(cells: usize) -> Dims {
    let mut best = Dims::new(cells, 1);
    for cols in 1..=cells {
        if cols * cols > cells {
            break;
        }
        if cells.is_multiple_of(cols) {
            // larger cols below sqrt is always closer to square
            best = Dims::new(cells / cols, cols);
        }
    }
    best
}

fn aspect(d: Dims) -> f64 {
    d.rows as f64 / d.cols as f64
}

/// Map size for a population of `k`: `round(sqrt(k))` cells, factored as
/// `rows x cols` with `rows >= cols` and the ratio closest to square. A
/// prime count of 5 or more, which would give a single column, moves to
/// the neighbouring count (one less or one more) that factors squarer.
pub fn grid_dims(k: usize) -> Dims {
    let cells = (math::round(math::sqrt(k as f64)) as usize).max(1);
    let exact = factor(cells);
    if cells < 5 || exact.cols > 1 {
        return exact;
    }
    let (below, above) = (factor(cells - 1), factor(cells + 1));
    if aspect(above) < aspect(below) {
        above
    } else {
        below
    }
}

/// In-bounds members of the six cells around `c`.
pub fn hex_neighbors(c: CellIndex, dims: Dims) -> Result<Vec<CellIndex>> {
    dims.check(c)?;
    let odd = c.row & 1 == 1;
    let offsets: [(i64, i64); 6] = if odd {
        [(0, -1), (0, 1), (-1, 0), (-1, 1), (1, 0), (1, 1)]
    } else {
        [(0, -1), (0, 1), (-1, -1), (-1, 0), (1, -1), (1, 0)]
    };
    let mut out = Vec::with_capacity(6);
    for (dr, dc) in offsets {
        let (r, col) = (c.row as i64 + dr, c.col as i64 + dc);
        if r >= 0 && col >= 0 && (r as usize) < dims.rows && (col as usize) < dims.cols {
            out.push(CellIndex::new(r as usize, col as usize));
        }
    }
    Ok(out)
}

/// Number of hex steps between two cells.
pub fn hex_distance(a: CellIndex, b: CellIndex) -> u64 {
    let (q1, r1) = a.axial();
    let (q2, r2) = b.axial();
    let (dq, dr) = (q1 - q2, r1 - r2);
    ((dq.abs() + dr.abs() + (dq + dr).abs()) / 2) as u64
}
