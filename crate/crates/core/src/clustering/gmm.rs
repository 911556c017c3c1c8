use alloc::string::String;
use alloc::vec::Vec;

use super::kmeans;
use crate::{math, rng, Error, Result};

const MAX_ITER: usize = 1000;
const STARTS: usize = 4;
/// Variance floor as a fraction of each dimension's overall variance.
const VAR_FLOOR: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct GmmFit {
    pub k: usize,
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
    pub log_likelihood: f64,
    pub bic: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Outcome of a BIC scan over candidate cluster counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub k: usize,
    /// `(k, bic)` for every candidate that fitted.
    pub scores: Vec<(usize, f64)>,
    /// Candidates dropped and why.
    pub skipped: Vec<(usize, String)>,
}

fn free_parameters(k: usize, dim: usize) -> usize {
    k * 2 * dim + k - 1
}

fn floors(points: &[Vec<f64>]) -> Vec<f64> {
    let dim = points[0].len();
    (0..dim)
        .map(|j| {
            let col: Vec<f64> = points.iter().map(|p| p[j]).collect();
            let m = math::mean(&col);
            let var = col.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / col.len() as f64;
            (VAR_FLOOR * var).max(1e-9)
        })
        .collect()
}

/// Diagonal-covariance Gaussian mixture fitted by EM from a k-means start.
pub fn fit_diagonal_gmm(points: &[Vec<f64>], k: usize, seed: u64) -> Result<GmmFit> {
    let start = kmeans(points, k, seed, 3)?;
    let floor = floors(points);
    let n = points.len();
    let dim = points[0].len();

    let mut weights = alloc::vec![0.0f64; k];
    let mut means = start.centroids.clone();
    let mut vars = alloc::vec![alloc::vec![0.0; dim]; k];
    for (p, &a) in points.iter().zip(&start.assignments) {
        weights[a] += 1.0;
        for j in 0..dim {
            let d = p[j] - means[a][j];
            vars[a][j] += d * d;
        }
    }
    for c in 0..k {
        for j in 0..dim {
            vars[c][j] = (vars[c][j] / weights[c].max(1.0)).max(floor[j]);
        }
        weights[c] /= n as f64;
    }

    let mut resp = alloc::vec![alloc::vec![0.0; k]; n];
    let mut prev = f64::NEG_INFINITY;
    let mut ll = f64::NEG_INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        // E step
        ll = 0.0;
        for (i, p) in points.iter().enumerate() {
            let mut maxlog = f64::NEG_INFINITY;
            for c in 0..k {
                let mut lp = math::ln(weights[c]);
                for j in 0..dim {
                    let d = p[j] - means[c][j];
                    lp -= 0.5 * (math::ln(2.0 * core::f64::consts::PI * vars[c][j]) + d * d / vars[c][j]);
                }
                resp[i][c] = lp;
                maxlog = maxlog.max(lp);
            }
            let s: f64 = resp[i].iter().map(|lp| math::exp(lp - maxlog)).sum();
            let lse = maxlog + math::ln(s);
            ll += lse;
            for r in resp[i].iter_mut() {
                *r = math::exp(*r - lse);
            }
        }
        if !ll.is_finite() {
            return Err(Error::InvalidConfig(alloc::format!("non-finite likelihood at k = {k}")));
        }
        if (ll - prev).abs() <= 1e-7 * n as f64 {
            converged = true;
            break;
        }
        prev = ll;
        // M step
        for c in 0..k {
            let nk: f64 = resp.iter().map(|r| r[c]).sum();
            if nk < 1e-10 {
                weights[c] = 1e-10;
                continue;
            }
            weights[c] = nk / n as f64;
            for j in 0..dim {
                means[c][j] = resp.iter().zip(points).map(|(r, p)| r[c] * p[j]).sum::<f64>() / nk;
            }
            for j in 0..dim {
                let v = resp
                    .iter()
                    .zip(points)
                    .map(|(r, p)| {
                        let d = p[j] - means[c][j];
                        r[c] * d * d
                    })
                    .sum::<f64>()
                    / nk;
                vars[c][j] = v.max(floor[j]);
            }
        }
    }
    let bic = -2.0 * ll + free_parameters(k, dim) as f64 * math::ln(n as f64);
    Ok(GmmFit { k, weights, means, variances: vars, log_likelihood: ll, bic, iterations, converged })
}

/// Picks the cluster count with the lowest BIC among `candidates`, fitting
/// several seeded EM starts per count. Ties go to the smaller count.
pub fn select_k(points: &[Vec<f64>], candidates: &[usize], seed: u64) -> Result<Selection> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut scores = Vec::new();
    let mut skipped = Vec::new();
    let mut ks = candidates.to_vec();
    ks.sort_unstable();
    ks.dedup();
    for &k in &ks {
        let mut best: Option<GmmFit> = None;
        let mut last_err = None;
        for s in 0..STARTS {
            match fit_diagonal_gmm(points, k, rng::derive(seed, (k * 1000 + s) as u64)) {
                Ok(fit) if fit.converged => {
                    if best.as_ref().is_none_or(|b| fit.log_likelihood > b.log_likelihood) {
                        best = Some(fit);
                    }
                }
                Ok(_) => last_err = Some(String::from("EM did not converge")),
                Err(e) => last_err = Some(alloc::format!("{e}")),
            }
        }
        match best {
            Some(fit) => scores.push((k, fit.bic)),
            None => skipped.push((k, last_err.unwrap_or_default())),
        }
    }
    let &(k, _) = scores
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .ok_or(Error::AllFitsFailed)?;
    Ok(Selection { k, scores, skipped })
}
