use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::configuration::Configuration;
use crate::error::{Error, Result};
use crate::rng::{run_replicas, StreamRng};

/// A source of i.i.d. random configurations.
pub trait ConfigurationSampler: Sync {
    fn dim(&self) -> usize;
    fn sample(&self, rng: &mut StreamRng) -> Configuration;
}

/// Homogeneous Poisson process of the given intensity on `[-h, h]^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonSampler {
    pub intensity: f64,
    pub half_width: f64,
    pub dim: usize,
}

impl PoissonSampler {
    pub fn new(intensity: f64, half_width: f64, dim: usize) -> Result<Self> {
        if !(intensity >= 0.0) || !(half_width > 0.0) || dim == 0 {
            return Err(Error::InvalidArgument(format!(
                "Poisson sampler needs intensity >= 0, half width > 0 and d >= 1, got {intensity}, {half_width}, {dim}"
            )));
        }
        Ok(Self { intensity, half_width, dim })
    }

    pub fn mean_count(&self) -> f64 {
        self.intensity * (2.0 * self.half_width).powi(self.dim as i32)
    }
}

impl ConfigurationSampler for PoissonSampler {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, rng: &mut StreamRng) -> Configuration {
        let mean = self.mean_count();
        let n = if mean > 0.0 { Poisson::new(mean).unwrap().sample(rng) as usize } else { 0 };
        let h = self.half_width;
        let coords = (0..n * self.dim).map(|_| rng.random_range(-h..h)).collect();
        Configuration::from_flat(self.dim, coords).unwrap()
    }
}

/// Draws uniformly among stored configurations, e.g. scaled SDE snapshots.
#[derive(Debug, Clone)]
pub struct SnapshotSampler {
    configs: Vec<Configuration>,
}

impl SnapshotSampler {
    pub fn new(configs: Vec<Configuration>) -> Result<Self> {
        if configs.is_empty() {
            return Err(Error::Empty("snapshot sampler needs at least one configuration".into()));
        }
        if configs.iter().any(|c| c.dim() != configs[0].dim()) {
            return Err(Error::InvalidArgument("snapshots of mixed dimension".into()));
        }
        Ok(Self { configs })
    }

    pub fn configs(&self) -> &[Configuration] {
        &self.configs
    }
}

impl ConfigurationSampler for SnapshotSampler {
    fn dim(&self) -> usize {
        self.configs[0].dim()
    }

    fn sample(&self, rng: &mut StreamRng) -> Configuration {
        self.configs[rng.random_range(0..self.configs.len())].clone()
    }
}

/// `m` configurations, replica `i` drawn from stream `(seed, i)`.
pub fn draw_samples<S: ConfigurationSampler + ?Sized>(sampler: &S, m: usize, seed: u64) -> Vec<Configuration> {
    run_replicas(seed, m, |_, rng| sampler.sample(rng))
}
