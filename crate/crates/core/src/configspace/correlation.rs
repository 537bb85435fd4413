use super::configuration::Configuration;
use crate::error::{Error, Result};
use crate::stats::Estimate;

/// Equal-width bins on `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bins {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Bins {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo < hi) || count == 0 {
            return Err(Error::InvalidArgument(format!("bad bins [{lo}, {hi}) x {count}")));
        }
        Ok(Self { lo, hi, count })
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.count as f64
    }

    pub fn index(&self, x: f64) -> Option<usize> {
        if x < self.lo || x >= self.hi {
            return None;
        }
        Some((((x - self.lo) / self.width()) as usize).min(self.count - 1))
    }

    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.width()
    }
}

/// Binned `ρ^n`. For `n = 2` values are row-major over `count × count` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationEstimate {
    pub order: usize,
    pub bins: Bins,
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
}

impl CorrelationEstimate {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.order {
            1 => self.values[i],
            _ => self.values[i * self.bins.count + j],
        }
    }
}

/// Estimates the one- or two-point correlation function of one-dimensional
/// configurations. Pairs are ordered and exclude `i = j`.
pub fn correlation_estimate(samples: &[Configuration], n: usize, bins: Bins) -> Result<CorrelationEstimate> {
    if samples.is_empty() {
        return Err(Error::Empty("no configurations to estimate correlations from".into()));
    }
    if !(1..=2).contains(&n) {
        return Err(Error::InvalidArgument(format!("correlation order must be 1 or 2, got {n}")));
    }
    if samples.iter().any(|c| c.dim() != 1) {
        return Err(Error::InvalidArgument("binned correlations are one-dimensional".into()));
    }
    let cells = bins.count.pow(n as u32);
    let volume = bins.width().powi(n as i32);
    let mut per_sample = vec![Vec::with_capacity(samples.len()); cells];
    let mut counts = vec![0.0; cells];
    for xi in samples {
        counts.iter_mut().for_each(|c| *c = 0.0);
        let idx: Vec<Option<usize>> = xi.points().map(|p| bins.index(p[0])).collect();
        if n == 1 {
            for b in idx.iter().flatten() {
                counts[*b] += 1.0;
            }
        } else {
            for (i, a) in idx.iter().enumerate() {
                for (j, b) in idx.iter().enumerate() {
                    if let (true, Some(a), Some(b)) = (i != j, a, b) {
                        counts[a * bins.count + b] += 1.0;
                    }
                }
            }
        }
        for (acc, c) in per_sample.iter_mut().zip(&counts) {
            acc.push(c / volume);
        }
    }
    let (values, std_errors) = per_sample
        .iter()
        .map(|v| {
            let e = Estimate::from_samples(v);
            (e.mean, if e.std_error.is_nan() { 0.0 } else { e.std_error })
        })
        .unzip();
    Ok(CorrelationEstimate { order: n, bins, values, std_errors })
}
