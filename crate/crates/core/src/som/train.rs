use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{hex_distance, CellIndex, Dims, SomMap};
use crate::features::FeatureMatrix;
use crate::{math, rng, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Init {
    /// Uniform within each column's data range.
    #[default]
    Random,
    /// Prototypes copied from randomly chosen rows.
    DataSample,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SomConfig {
    pub rows: usize,
    pub cols: usize,
    pub epochs: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    pub radius_start: f64,
    pub radius_end: f64,
    pub seed: u64,
    pub init: Init,
}

impl SomConfig {
    /// Default schedule for a `rows x cols` map: 100 epochs, learning rate
    /// 0.5 to 0.01, radius half the longer side down to 1.
    pub fn new(rows: usize, cols: usize) -> Self {
        let radius_start = rows.max(cols) as f64 / 2.0;
        SomConfig {
            rows,
            cols,
            epochs: 100,
            lr_start: 0.5,
            lr_end: 0.01,
            radius_start,
            radius_end: radius_start.min(1.0),
            seed: 0,
            init: Init::Random,
        }
    }

    /// Defaults on a grid sized by [`super::grid_dims`] for `k` entities.
    pub fn for_population(k: usize) -> Self {
        let d = super::grid_dims(k);
        Self::new(d.rows, d.cols)
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SomConfig { seed, ..self }
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.rows, self.cols)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.rows * self.cols == 0 {
            return bad("map needs at least one cell");
        }
        if !(self.lr_end > 0.0 && self.lr_start >= self.lr_end && self.lr_start <= 1.0) {
            return bad("learning rates must satisfy 1 >= lr_start >= lr_end > 0");
        }
        if !(self.radius_end >= 0.0 && self.radius_start >= self.radius_end) {
            return bad("radii must satisfy radius_start >= radius_end >= 0");
        }
        Ok(())
    }
}

/// Start to end, exponentially when both ends are positive.
fn interpolate(start: f64, end: f64, frac: f64) -> f64 {
    if start > 0.0 && end > 0.0 {
        start * math::powf(end / start, frac)
    } else {
        start + (end - start) * frac
    }
}

fn neighborhood(grid_dist: u64, radius: f64) -> f64 {
    let d = grid_dist as f64;
    if radius > 0.0 {
        math::exp(-d * d / (2.0 * radius * radius))
    } else {
        (grid_dist == 0) as u8 as f64
    }
}

struct Phase {
    epochs: usize,
    lr: (f64, f64),
    radius: (f64, f64),
}

/// Rough ordering over the first half of the epochs, then fine tuning.
fn phases(cfg: &SomConfig) -> [Phase; 2] {
    let rough_epochs = cfg.epochs / 2;
    let mid_lr = (0.1 * cfg.lr_start).max(cfg.lr_end);
    let mid_radius = (cfg.radius_end + 1.0).min(cfg.radius_start);
    [
        Phase { epochs: rough_epochs, lr: (cfg.lr_start, mid_lr), radius: (cfg.radius_start, mid_radius) },
        Phase { epochs: cfg.epochs - rough_epochs, lr: (mid_lr, cfg.lr_end), radius: (mid_radius, cfg.radius_end) },
    ]
}

impl SomMap {
    /// Untrained map with prototypes drawn per `config.init`.
    pub fn initialize(data: &FeatureMatrix, config: &SomConfig) -> Result<SomMap> {
        config.validate()?;
        if data.n_rows() == 0 || data.n_cols() == 0 {
            return Err(Error::EmptyInput);
        }
        let dim = data.n_cols();
        let cells = config.dims().cells();
        let mut rng = rng::seeded(rng::derive(config.seed, 0));
        let mut prototypes = Vec::with_capacity(cells * dim);
        match config.init {
            Init::Random => {
                let ranges: Vec<(f64, f64)> = (0..dim)
                    .map(|j| {
                        let col = data.column(j);
                        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        (lo, hi)
                    })
                    .collect();
                for _ in 0..cells {
                    for &(lo, hi) in &ranges {
                        prototypes.push(lo + (hi - lo) * rng.random::<f64>());
                    }
                }
            }
            Init::DataSample => {
                let mut order: Vec<usize> = (0..data.n_rows()).collect();
                order.shuffle(&mut rng);
                for c in 0..cells {
                    prototypes.extend_from_slice(data.row(order[c % order.len()]));
                }
            }
        }
        Ok(SomMap {
            config: *config,
            columns: data.columns().to_vec(),
            transforms: data.all_transforms().to_vec(),
            dim,
            prototypes,
            trained: false,
        })
    }

    /// One online update: finds the winner for `v` and pulls every
    /// prototype toward `v` by `lr * h(grid distance to winner)`.
    pub fn update_step(&mut self, v: &[f64], lr: f64, radius: f64) -> Result<CellIndex> {
        self.check_dim(v.len())?;
        let cols = self.dims().cols;
        let (w, _) = self.winner_linear(v);
        let winner = CellIndex::from_linear(w, cols);
        let dim = self.dim;
        for (i, proto) in self.prototypes.chunks_mut(dim).enumerate() {
            let h = neighborhood(hex_distance(CellIndex::from_linear(i, cols), winner), radius);
            let rate = lr * h;
            if rate == 0.0 {
                continue;
            }
            for (p, x) in proto.iter_mut().zip(v) {
                *p += rate * (x - *p);
            }
        }
        Ok(winner)
    }
}

/// Sequential Kohonen training.
///
/// Every epoch presents all rows once in a seeded random order. Learning
/// rate and Gaussian neighbourhood radius decay exponentially over two
/// phases (see [`SomConfig::new`] for defaults). Identical inputs and seed
/// give bit-identical maps.
pub fn train(data: &FeatureMatrix, config: &SomConfig) -> Result<SomMap> {
    let mut map = SomMap::initialize(data, config)?;
    let n = data.n_rows();
    let mut rng = rng::seeded(rng::derive(config.seed, 1));
    let mut order: Vec<usize> = (0..n).collect();
    for phase in phases(config) {
        let steps = phase.epochs * n;
        let denom = steps.saturating_sub(1).max(1) as f64;
        let mut t = 0usize;
        for _ in 0..phase.epochs {
            order.shuffle(&mut rng);
            for &row in &order {
                let frac = t as f64 / denom;
                let lr = interpolate(phase.lr.0, phase.lr.1, frac);
                let radius = interpolate(phase.radius.0, phase.radius.1, frac);
                map.update_step(data.row(row), lr, radius)?;
                t += 1;
            }
        }
    }
    map.trained = true;
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::String;
    use alloc::vec;
    use rand_distr::{Distribution, StandardNormal};

    fn fm(rows: &[Vec<f64>]) -> FeatureMatrix {
        let dim = rows[0].len();
        let names: Vec<String> = (0..dim).map(|i| format!("f{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        FeatureMatrix::from_rows((0..rows.len()).map(|i| format!("{i}")).collect(), &refs, rows).unwrap()
    }

    fn random_rows(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = crate::rng::seeded(seed);
        (0..n).map(|_| (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect()).collect()
    }

    #[test]
    fn config_validation() {
        assert!(SomConfig::new(3, 3).validate().is_ok());
        assert!(SomConfig::new(0, 3).validate().is_err());
        assert!(SomConfig { lr_end: 0.9, ..SomConfig::new(3, 3) }.validate().is_err());
        assert!(SomConfig { radius_end: 5.0, ..SomConfig::new(3, 3) }.validate().is_err());
        let one = SomConfig::new(1, 1);
        assert!(one.validate().is_ok());
        assert_eq!(one.radius_end, 0.5);
    }

    #[test]
    fn empty_data_rejected() {
        let empty = FeatureMatrix::new(vec![], vec!["a".into()], vec![]).unwrap();
        assert_eq!(train(&empty, &SomConfig::new(2, 2)).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn single_vector_is_learned() {
        let v = vec![0.3, -1.2, 4.0];
        let data = fm(core::slice::from_ref(&v));
        for init in [Init::Random, Init::DataSample] {
            let cfg = SomConfig { epochs: 50, init, ..SomConfig::new(3, 3) };
            let m = train(&data, &cfg).unwrap();
            let w = m.find_winner(&v).unwrap();
            let d = math::dist(m.prototype(w.linear(3)), &v);
            assert!(d < 1e-3);
        }
    }

    #[test]
    fn single_vector_attracts_every_prototype() {
        let data = fm(&random_rows(30, 3, 4));
        let cfg = SomConfig::new(4, 4);
        let mut m = SomMap::initialize(&data, &cfg).unwrap();
        let v = [5.0, 5.0, 5.0];
        let before: Vec<f64> = (0..16).map(|i| math::dist(m.prototype(i), &v)).collect();
        m.update_step(&v, 0.5, 2.0).unwrap();
        for i in 0..16 {
            assert!(math::dist(m.prototype(i), &v) < before[i]);
        }
    }

    #[test]
    fn training_reduces_quantization_error() {
        for seed in 0..10 {
            let data = fm(&random_rows(120, 5, 100 + seed));
            let cfg = SomConfig { epochs: 20, ..SomConfig::for_population(120) }.with_seed(seed);
            let init = SomMap::initialize(&data, &cfg).unwrap();
            let trained = train(&data, &cfg).unwrap();
            assert!(trained.is_trained() && !init.is_trained());
            assert!(trained.quantization_error(&data).unwrap() <= init.quantization_error(&data).unwrap());
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let data = fm(&random_rows(80, 4, 1));
        let cfg = SomConfig { epochs: 10, ..SomConfig::new(4, 3) }.with_seed(9);
        let a = train(&data, &cfg).unwrap();
        let b = train(&data, &cfg).unwrap();
        assert_eq!(a.prototypes(), b.prototypes());
        let c = train(&data, &cfg.with_seed(10)).unwrap();
        assert_ne!(a.prototypes(), c.prototypes());
    }

    #[test]
    fn schedule_endpoints() {
        let cfg = SomConfig::new(10, 6);
        let [p1, p2] = phases(&cfg);
        assert_eq!((p1.epochs, p2.epochs), (50, 50));
        assert_eq!(p1.radius, (5.0, 2.0));
        assert_eq!(p2.radius, (2.0, 1.0));
        assert!((p1.lr.1 - 0.05).abs() < 1e-15);
        assert!((interpolate(0.5, 0.05, 1.0) - 0.05).abs() < 1e-15);
        assert_eq!(interpolate(2.0, 0.0, 0.5), 1.0);
        assert_eq!(neighborhood(0, 0.0), 1.0);
        assert_eq!(neighborhood(1, 0.0), 0.0);
    }

    proptest::proptest! {
        #[test]
        fn update_moves_winner_closer(
            v in proptest::collection::vec(-10.0f64..10.0, 3),
            lr in 0.01f64..=1.0,
            radius in 0.0f64..4.0,
            seed in 0u64..1000,
        ) {
            let data = fm(&random_rows(10, 3, seed));
            let mut m = SomMap::initialize(&data, &SomConfig::new(3, 3).with_seed(seed)).unwrap();
            let w = m.find_winner(&v).unwrap().linear(3);
            let before = math::dist(m.prototype(w), &v);
            m.update_step(&v, lr, radius).unwrap();
            let after = math::dist(m.prototype(w), &v);
            proptest::prop_assume!(before > 0.0);
            proptest::prop_assert!(after < before);
        }
    }
}
