//! Truncated drifts of the infinite-dimensional SDEs driven by the sine and
//! Airy point fields, and diagnostics for their limits in the truncation
//! radius.

use std::f64::consts::PI;
use std::str::FromStr;

use crate::configspace::Configuration;
use crate::error::{ensure_finite, Error, Result};

/// Differences at or below this size count as converged.
pub const CONVERGED_DIFFERENCE: f64 = 1e-14;
/// Required shrink factor of successive differences per doubling of `r`.
pub const SHRINK_PER_DOUBLING: f64 = 1.2;
/// Number of trailing radius doublings examined.
pub const DOUBLINGS_EXAMINED: f64 = 3.0;

/// Which drift the diagnostic evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftField {
    Sine,
    Airy,
}

impl FromStr for DriftField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sin" | "sine" => Ok(DriftField::Sine),
            "airy" | "ai" => Ok(DriftField::Airy),
            other => Err(Error::InvalidArgument(format!("unknown field '{other}', expected sin or airy"))),
        }
    }
}

fn check_line(xi: &Configuration) -> Result<()> {
    if xi.dim() != 1 {
        return Err(Error::InvalidArgument("drifts are defined for one-dimensional configurations".into()));
    }
    Ok(())
}

/// `Σ_{|x_k| < r, k ≠ self} 1/(x - x_k)`. `self_index` refers to the
/// canonical order of `ξ`.
pub fn sin_drift(x: f64, xi: &Configuration, r: f64, self_index: Option<usize>) -> Result<f64> {
    ensure_finite("x", x)?;
    check_line(xi)?;
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("truncation radius must be positive, got {r}")));
    }
    let mut total = 0.0;
    for (k, p) in xi.points().enumerate() {
        if Some(k) == self_index || !(p[0].abs() < r) {
            continue;
        }
        if p[0] == x {
            return Err(Error::Singularity { index: k, position: x });
        }
        total += 1.0 / (x - p[0]);
    }
    Ok(total)
}

/// `∫_{-r}^0 ρ̂(y)/(-y) dy = 2√r/π` for `ρ̂(y) = √(-y)/π` on `y < 0`.
pub fn airy_compensator(r: f64) -> f64 {
    2.0 * r.max(0.0).sqrt() / PI
}

/// `Σ_{|x_k| < r, k ≠ self} 1/(x - x_k) - 2√r/π`.
pub fn airy_drift(x: f64, xi: &Configuration, r: f64, self_index: Option<usize>) -> Result<f64> {
    Ok(sin_drift(x, xi, r, self_index)? - airy_compensator(r))
}

/// Deterministic points `y_k = -(3π(k - ½)/2)^{2/3}` with `|y_k| < r_max`,
/// placed at the mid-quantiles of `ρ̂`.
pub fn continuum_proxy(r_max: f64) -> Configuration {
    let mut ys = Vec::new();
    for k in 1.. {
        let y = -(1.5 * PI * (k as f64 - 0.5)).powf(2.0 / 3.0);
        if y.abs() >= r_max {
            break;
        }
        ys.push(y);
    }
    Configuration::on_line(&ys).expect("finite points")
}

/// Drift values over increasing truncation radii.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftDiagnostic {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// `values[i+1] - values[i]`.
    pub differences: Vec<f64>,
    pub cauchy: bool,
}

impl DriftDiagnostic {
    /// Builds the diagnostic from drift values at the given radii.
    pub fn from_values(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() != values.len() {
            return Err(Error::InvalidArgument("radii and values differ in length".into()));
        }
        if radii.windows(2).any(|w| !(w[0] < w[1])) || radii.first().is_some_and(|&r| !(r > 0.0)) {
            return Err(Error::InvalidArgument(format!("radii must be positive and strictly increasing: {radii:?}")));
        }
        let differences: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
        let cauchy = shrinks(&radii, &differences);
        Ok(Self { radii, values, differences, cauchy })
    }

    /// Observed shrink factor per doubling over the trailing window, if defined.
    pub fn shrink_rate(&self) -> Option<f64> {
        shrink_rate(&self.radii, &self.differences)
    }
}

/// Compares the earliest difference ending within the last three doublings of
/// the largest radius (or the one before, if only one qualifies) with the last.
fn shrink_rate(radii: &[f64], diffs: &[f64]) -> Option<f64> {
    if diffs.len() < 2 {
        return None;
    }
    let top = *radii.last().unwrap();
    let floor = top / 2f64.powf(DOUBLINGS_EXAMINED);
    let mut first = (0..diffs.len()).find(|&i| radii[i + 1] >= floor).unwrap();
    first = first.min(diffs.len() - 2);
    let last = diffs.len() - 1;
    let (a, b) = (diffs[first].abs(), diffs[last].abs());
    if b <= CONVERGED_DIFFERENCE {
        return Some(f64::INFINITY);
    }
    let doublings = (radii[last + 1] / radii[first + 1]).log2();
    Some((a / b).powf(1.0 / doublings))
}

fn shrinks(radii: &[f64], diffs: &[f64]) -> bool {
    shrink_rate(radii, diffs).is_some_and(|rate| rate >= SHRINK_PER_DOUBLING)
}

/// Evaluates the chosen drift at every radius.
pub fn drift_convergence(
    x: f64,
    xi: &Configuration,
    radii: &[f64],
    field: DriftField,
    self_index: Option<usize>,
) -> Result<DriftDiagnostic> {
    let values = radii
        .iter()
        .map(|&r| match field {
            DriftField::Sine => sin_drift(x, xi, r, self_index),
            DriftField::Airy => airy_drift(x, xi, r, self_index),
        })
        .collect::<Result<Vec<_>>>()?;
    DriftDiagnostic::from_values(radii.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::QuadratureRule;

    #[test]
    fn simple_sine_drifts() {
        let pair = Configuration::on_line(&[-1.0, 1.0]).unwrap();
        assert_eq!(sin_drift(0.0, &pair, 5.0, None).unwrap(), 0.0);
        let one = Configuration::on_line(&[2.0]).unwrap();
        assert_eq!(sin_drift(0.0, &one, 5.0, None).unwrap(), -0.5);
        assert_eq!(sin_drift(0.0, &one, 1.5, None).unwrap(), 0.0);
    }

    #[test]
    fn lattice_cancels() {
        let ks: Vec<f64> = (-40..=40).map(|k| k as f64).collect();
        let xi = Configuration::on_line(&ks).unwrap();
        assert_eq!(xi.point(0), &[0.0]);
        for r in [5.5, 10.5, 39.5] {
            assert_eq!(sin_drift(0.0, &xi, r, Some(0)).unwrap(), 0.0);
        }
        let d = drift_convergence(0.0, &xi, &[5.5, 10.5, 20.5, 39.5], DriftField::Sine, Some(0)).unwrap();
        assert!(d.differences.iter().all(|&v| v == 0.0));
        assert!(d.cauchy);
    }

    #[test]
    fn coincidence_is_an_error() {
        let xi = Configuration::on_line(&[0.5, 1.0]).unwrap();
        assert!(matches!(sin_drift(0.5, &xi, 3.0, None), Err(Error::Singularity { index: 0, .. })));
        assert!(sin_drift(0.5, &xi, 3.0, Some(0)).is_ok());
    }

    #[test]
    fn translation_covariance() {
        let xi = Configuration::on_line(&[-1.3, -0.2, 0.4, 1.1, 2.5]).unwrap();
        let c = 0.7;
        let shifted = Configuration::on_line(&xi.coords().iter().map(|v| v + c).collect::<Vec<_>>()).unwrap();
        let a = sin_drift(0.1, &xi, 10.0, None).unwrap();
        let b = sin_drift(0.1 + c, &shifted, 10.0 + c, None).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn compensator_values() {
        assert!((airy_compensator(PI * PI / 4.0) - 1.0).abs() < 1e-15);
        assert_eq!(airy_compensator(0.0), 0.0);
        for r in [1.0, 4.0, 9.0, 16.0] {
            let q = QuadratureRule::composite(30, 0.0, r, 1)
                .unwrap()
                .integrate(|s| {
                    let u = s * s / r;
                    (u.sqrt() / PI) / u * (2.0 * s / r)
                });
            assert!((q - airy_compensator(r)).abs() < 1e-8, "r = {r}: {q}");
        }
    }

    #[test]
    fn empty_configuration_is_pure_compensator() {
        let xi = Configuration::empty(1);
        assert!((airy_drift(0.3, &xi, 1.0, None).unwrap() + 2.0 / PI).abs() < 1e-15);
        let radii = [1.0, 2.0, 4.0, 8.0, 16.0];
        let d = drift_convergence(0.3, &xi, &radii, DriftField::Airy, None).unwrap();
        for (i, diff) in d.differences.iter().enumerate() {
            let r = radii[i];
            assert!((diff + 2.0 * ((2.0 * r).sqrt() - r.sqrt()) / PI).abs() < 1e-14);
        }
        assert!(!d.cauchy);
    }

    #[test]
    fn additivity() {
        let xi = Configuration::on_line(&[-3.0, -1.0]).unwrap();
        let with = xi.with_point(&[-2.2]).unwrap();
        let delta = airy_drift(1.0, &with, 5.0, None).unwrap() - airy_drift(1.0, &xi, 5.0, None).unwrap();
        assert!((delta - 1.0 / 3.2).abs() < 1e-15);
    }

    #[test]
    fn continuum_proxy_tracks_integral() {
        let xi = continuum_proxy(400.0);
        for r in [25.0, 100.0, 400.0] {
            let drift = airy_drift(1.0, &xi, r, None).unwrap();
            let oracle = -2.0 / PI * r.sqrt().atan();
            assert!((drift - oracle).abs() < 0.1, "r = {r}: {drift} vs {oracle}");
        }
        let d = drift_convergence(1.0, &xi, &[25.0, 100.0, 400.0], DriftField::Airy, None).unwrap();
        assert!(d.differences[1].abs() < d.differences[0].abs());
        assert!(d.cauchy, "{d:?}");
    }

    #[test]
    fn radii_must_increase() {
        let xi = Configuration::empty(1);
        assert!(drift_convergence(0.0, &xi, &[2.0, 1.0], DriftField::Sine, None).is_err());
        let one = drift_convergence(0.0, &xi, &[2.0], DriftField::Sine, None).unwrap();
        assert!(!one.cauchy);
    }
}
