//! Correlation matrices, the Mantel permutation test, the Lilliefors
//! normality test and the log-transform gate built on it.

mod correlation;
mod lilliefors;
mod mantel;

pub use correlation::{correlation_matrix, pearson, CorrelationMatrix};
pub use lilliefors::{
    ks_normal_statistic, lilliefors_test, log_gate, log_gate_with, Gated, LillieforsConfig,
    LillieforsNull, NormalityVerdict,
};
pub use mantel::{mantel_test, MantelResult};

use alloc::vec::Vec;

use crate::{Error, Result};

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SquareMatrix {
    order: usize,
    values: Vec<f64>,
}

impl SquareMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let order = rows.len();
        let mut values = Vec::with_capacity(order * order);
        for r in rows {
            if r.len() != order {
                return Err(Error::NotSquare { rows: order, cols: r.len() });
            }
            values.extend_from_slice(r);
        }
        Ok(SquareMatrix { order, values })
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                values.push(f(i, j));
            }
        }
        SquareMatrix { order, values }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.order + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.order.max(1))
    }

    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        for i in 0..self.order {
            for j in (i + 1)..self.order {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// Upper off-diagonal triangle, row by row.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.order * self.order.saturating_sub(1) / 2);
        for i in 0..self.order {
            for j in (i + 1)..self.order {
                out.push(self.get(i, j));
            }
        }
        out
    }
}
