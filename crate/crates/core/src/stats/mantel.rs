use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::{pearson, SquareMatrix};
use crate::rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MantelResult {
    pub r: f64,
    pub p_bilateral: f64,
    pub permutations: usize,
}

/// Mantel test between two symmetric matrices of the same order.
///
/// `r` correlates the upper off-diagonal triangles. The null distribution
/// permutes rows and columns of `m2` jointly; the two-sided p-value is
/// `(1 + #{|r*| >= |r|}) / (permutations + 1)`.
pub fn mantel_test(
    m1: &SquareMatrix,
    m2: &SquareMatrix,
    permutations: usize,
    seed: u64,
) -> Result<MantelResult> {
    let n = m1.order();
    if m2.order() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m2.order() });
    }
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    m1.check_symmetric(1e-12)?;
    m2.check_symmetric(1e-12)?;
    let x = m1.upper_triangle();
    let y = m2.upper_triangle();
    let r = pearson(&x, &y).ok_or(Error::ConstantColumn(alloc::string::String::from(
        "off-diagonal entries",
    )))?;

    let mut rng = rng::seeded(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut yp = alloc::vec![0.0; y.len()];
    let mut extreme = 0usize;
    // ties at |r| must count; allow for rounding in the permuted sums
    let bar = r.abs() - 1e-12;
    for _ in 0..permutations {
        perm.shuffle(&mut rng);
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                yp[k] = m2.get(perm[i], perm[j]);
                k += 1;
            }
        }
        if let Some(rp) = pearson(&x, &yp) {
            if rp.abs() >= bar {
                extreme += 1;
            }
        }
    }
    Ok(MantelResult {
        r,
        p_bilateral: (1 + extreme) as f64 / (permutations + 1) as f64,
        permutations,
    })
}
