use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::SquareMatrix;
use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub values: SquareMatrix,
}

/// Pearson coefficient by the two-pass (centred) formula. `None` when
/// either input has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mx, my) = (math::mean(x), math::mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / math::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Pairwise Pearson coefficients of named, equally long columns.
pub fn correlation_matrix<S: AsRef<str>>(columns: &[(S, Vec<f64>)]) -> Result<CorrelationMatrix> {
    if columns.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: columns.len() });
    }
    let len = columns[0].1.len();
    if len < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: len });
    }
    for (name, col) in columns {
        if col.len() != len {
            return Err(Error::DimensionMismatch { expected: len, got: col.len() });
        }
        if col.iter().all(|&v| v == col[0]) {
            return Err(Error::ConstantColumn(name.as_ref().to_string()));
        }
    }
    let k = columns.len();
    let mut m = alloc::vec![alloc::vec![1.0; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            // non-constant columns checked above; rounding can still zero a variance
            let r = pearson(&columns[i].1, &columns[j].1)
                .ok_or_else(|| Error::ConstantColumn(columns[j].0.as_ref().to_string()))?;
            m[i][j] = r;
            m[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        names: columns.iter().map(|(n, _)| n.as_ref().to_string()).collect(),
        values: SquareMatrix::from_rows(&m)?,
    })
}
