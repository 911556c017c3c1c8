use alloc::vec::Vec;

use rand::Rng;

use crate::{math, rng, Error, Result};

const MAX_ITER: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    pub iterations: usize,
    /// Inertia after each assignment step of the winning run.
    pub inertia_trace: Vec<f64>,
}

/// Lloyd's algorithm from k-means++ seeds, best of `restarts` runs by
/// inertia. A cluster that empties is re-seeded at the point farthest from
/// its centroid.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, restarts: usize) -> Result<KMeansFit> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if k > points.len() {
        return Err(Error::TooManyClusters { k, n: points.len() });
    }
    let dim = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
    }
    let mut best: Option<KMeansFit> = None;
    for r in 0..restarts.max(1) {
        let fit = lloyd(points, k, rng::derive(seed, r as u64));
        if best.as_ref().is_none_or(|b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    Ok(canonical(best.expect("at least one run")))
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = math::sq_dist(p, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn plus_plus(points: &[Vec<f64>], k: usize, rng: &mut rng::Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..n)].clone());
    let mut d2: Vec<f64> = points.iter().map(|p| math::sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 && target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            while d2[chosen] == 0.0 {
                // rounding ran off the end; take the last positive weight
                chosen -= 1;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centroids.push(points[pick].clone());
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(math::sq_dist(p, &centroids[centroids.len() - 1]));
        }
    }
    centroids
}

fn lloyd(points: &[Vec<f64>], k: usize, seed: u64) -> KMeansFit {
    let mut rng = rng::seeded(seed);
    let dim = points[0].len();
    let mut centroids = plus_plus(points, k, &mut rng);
    let mut assignments = alloc::vec![usize::MAX; points.len()];
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut changed = false;
        let mut inertia = 0.0;
        let mut dists = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            let (j, d) = nearest(p, &centroids);
            if assignments[i] != j {
                assignments[i] = j;
                changed = true;
            }
            inertia += d;
            dists.push(d);
        }
        trace.push(inertia);
        if !changed || iterations >= MAX_ITER {
            break;
        }
        let mut sums = alloc::vec![alloc::vec![0.0; dim]; k];
        let mut counts = alloc::vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignments) {
            counts[a] += 1;
            for (s, x) in sums[a].iter_mut().zip(p) {
                *s += x;
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                centroids[j] = sums[j].iter().map(|s| s / counts[j] as f64).collect();
            } else {
                let far = (0..points.len())
                    .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)))
                    .expect("non-empty");
                centroids[j] = points[far].clone();
                dists[far] = 0.0;
            }
        }
    }
    let inertia = *trace.last().expect("one pass");
    KMeansFit { assignments, centroids, inertia, iterations, inertia_trace: trace }
}

/// Relabels clusters in order of first appearance.
fn canonical(fit: KMeansFit) -> KMeansFit {
    let k = fit.centroids.len();
    let mut map = alloc::vec![usize::MAX; k];
    let mut next = 0;
    for &a in &fit.assignments {
        if map[a] == usize::MAX {
            map[a] = next;
            next += 1;
        }
    }
    for slot in map.iter_mut().filter(|m| **m == usize::MAX) {
        *slot = next;
        next += 1;
    }
    let mut centroids = alloc::vec![Vec::new(); k];
    for (old, c) in fit.centroids.into_iter().enumerate() {
        centroids[map[old]] = c;
    }
    KMeansFit {
        assignments: fit.assignments.iter().map(|&a| map[a]).collect(),
        centroids,
        ..fit
    }
}

/// Mean silhouette width of a labelling (singletons score 0).
pub fn silhouette(points: &[Vec<f64>], labels: &[usize], k: usize) -> f64 {
    let n = points.len();
    if n == 0 || k < 2 {
        return 0.0;
    }
    let mut sizes = alloc::vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    let mut total = 0.0;
    let mut sums = alloc::vec![0.0; k];
    for i in 0..n {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            if i != j {
                sums[labels[j]] += math::dist(&points[i], &points[j]);
            }
        }
        let own = labels[i];
        if sizes[own] <= 1 {
            continue;
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && sizes[c] > 0)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        if b.is_finite() {
            let m = a.max(b);
            if m > 0.0 {
                total += (b - a) / m;
            }
        }
    }
    total / n as f64
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use alloc::vec;
    use rand_distr::{Distribution, Normal};

    pub(crate) fn blobs(centers: &[Vec<f64>], per: usize, sd: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rng = crate::rng::seeded(seed);
        let noise = Normal::new(0.0, sd).unwrap();
        let mut pts = Vec::new();
        let mut truth = Vec::new();
        for (c, center) in centers.iter().enumerate() {
            for _ in 0..per {
                pts.push(center.iter().map(|x| x + noise.sample(&mut rng)).collect());
                truth.push(c);
            }
        }
        (pts, truth)
    }

    #[test]
    fn single_cluster_is_the_mean() {
        let pts = vec![vec![0.0, 1.0], vec![2.0, 3.0], vec![4.0, 8.0]];
        let fit = kmeans(&pts, 1, 0, 3).unwrap();
        assert_eq!(fit.centroids[0], vec![2.0, 4.0]);
        assert_eq!(fit.assignments, vec![0, 0, 0]);
    }

    #[test]
    fn one_cluster_per_point() {
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let fit = kmeans(&pts, 6, 4, 1).unwrap();
        assert_eq!(fit.inertia, 0.0);
        assert_eq!(fit.assignments, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn errors() {
        let pts = vec![vec![0.0], vec![1.0]];
        assert_eq!(kmeans(&pts, 3, 0, 1).unwrap_err(), Error::TooManyClusters { k: 3, n: 2 });
        assert_eq!(kmeans(&[], 1, 0, 1).unwrap_err(), Error::EmptyInput);
        assert!(kmeans(&pts, 0, 0, 1).is_err());
    }

    #[test]
    fn separated_blobs_recovered() {
        for seed in 0..10 {
            let (pts, truth) = blobs(&[vec![0.0; 3], vec![12.0; 3]], 50, 1.0, seed);
            let fit = kmeans(&pts, 2, seed, 5).unwrap();
            let flip = fit.assignments[0] != truth[0];
            for (a, t) in fit.assignments.iter().zip(&truth) {
                assert_eq!((*a == 1) ^ flip, *t == 1);
            }
        }
    }

    #[test]
    fn inertia_never_increases() {
        let (pts, _) = blobs(&[vec![0.0, 0.0], vec![3.0, 1.0], vec![1.0, 4.0]], 40, 1.5, 77);
        for seed in 0..10 {
            let fit = kmeans(&pts, 5, seed, 1).unwrap();
            for w in fit.inertia_trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-9);
            }
        }
    }

    #[test]
    fn duplicate_points_still_cluster() {
        let pts = vec![vec![1.0]; 5];
        let fit = kmeans(&pts, 3, 1, 2).unwrap();
        assert_eq!(fit.inertia, 0.0);
        assert_eq!(fit.centroids.len(), 3);
    }

    #[test]
    fn silhouette_prefers_true_split() {
        let (pts, truth) = blobs(&[vec![0.0, 0.0], vec![10.0, 10.0]], 30, 1.0, 3);
        let good = silhouette(&pts, &truth, 2);
        let mixed: Vec<usize> = (0..60).map(|i| i % 2).collect();
        assert!(good > 0.8);
        assert!(silhouette(&pts, &mixed, 2) < 0.1);
    }
}
