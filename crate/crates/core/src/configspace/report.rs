use rayon::prelude::*;

use super::bernstein::{bernstein_symmetric_approx, BernsteinApprox};
use super::configuration::Configuration;
use super::cutoff::{cutoff, BoundSequence};
use super::energy::H1Estimate;
use super::local::{LocalFunction, DEFAULT_GRAD_STEP};
use super::mobius::{mobius_transform_unchecked, truncate_with_bound};
use super::sampler::{draw_samples, ConfigurationSampler};
use crate::error::{Error, Result};

/// One `(m, N)` row of the core-approximation report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoreApproxRow {
    pub m: usize,
    pub bern_n: usize,
    /// `‖(1 - 𝒳[a]) (f - f_[m])‖₁`.
    pub gap1: H1Estimate,
    /// `‖f_[m] - Σ_{n ≤ m} F_n‖₁` with `F_n` the Bernstein–mollifier
    /// approximation of `f̂_n`.
    pub gap2: H1Estimate,
}

/// Alternating sums below this multiple of `ε · Σ|terms|` are rounding noise.
const SNAP: f64 = 64.0 * f64::EPSILON;

fn snap(value: f64, scale: f64) -> f64 {
    if value.abs() <= SNAP * scale {
        0.0
    } else {
        value
    }
}

/// `f - f_[m]` with rounding-level residue set to zero.
fn truncation_residual(f: &LocalFunction, m: usize, xi: &Configuration) -> Result<f64> {
    let full = f.evaluate(xi)?;
    let (part, abs) = truncate_with_bound(f, m, xi)?;
    Ok(snap(full - part, abs + full.abs()))
}

fn fd_gradient<F>(xi: &Configuration, only: Option<&super::Window>, step: f64, f: F) -> Result<Vec<f64>>
where
    F: Fn(&Configuration) -> Result<f64>,
{
    let d = xi.dim();
    let base = xi.coords().to_vec();
    let mut out = Vec::new();
    let mut work = base.clone();
    for (i, p) in base.chunks(d).enumerate() {
        if only.is_some_and(|w| !w.contains(p)) {
            continue;
        }
        for c in 0..d {
            let at = i * d + c;
            let h = step * (1.0 + base[at].abs());
            work[at] = base[at] + h;
            let up = f(&Configuration::from_flat(d, work.clone())?)?;
            work[at] = base[at] - h;
            let down = f(&Configuration::from_flat(d, work.clone())?)?;
            work[at] = base[at];
            out.push((up - down) / (2.0 * h));
        }
    }
    Ok(out)
}

fn half_square(g: &[f64]) -> f64 {
    0.5 * g.iter().map(|v| v * v).sum::<f64>()
}

/// `Σ_{1 ≤ n ≤ m} Σ_{|η| = n} (f̂_n)_N(η)` and its gradient at the in-window points.
fn polynomial_part(approx: &[BernsteinApprox], local: &Configuration) -> (f64, Vec<f64>) {
    let (d, k) = (local.dim(), local.len());
    let mut grad = vec![0.0; k * d];
    if approx.iter().all(|a| a.is_zero()) || k == 0 {
        return (0.0, grad);
    }
    let first = approx.iter().find(|a| !a.is_zero()).unwrap();
    let vecs: Vec<(Vec<f64>, Vec<f64>)> = local.coords().iter().map(|&x| first.smoothed_vectors(x)).collect();
    let mut value = 0.0;
    for (idx, a) in approx.iter().enumerate() {
        let n = idx + 1;
        if a.is_zero() || n > k {
            continue;
        }
        for mask in 0u32..(1 << k) {
            if mask.count_ones() as usize != n {
                continue;
            }
            let coords: Vec<usize> =
                (0..k).filter(|i| mask >> i & 1 == 1).flat_map(|i| (0..d).map(move |c| i * d + c)).collect();
            let vals: Vec<&[f64]> = coords.iter().map(|&c| vecs[c].0.as_slice()).collect();
            value += a.contract(&vals);
            for (slot, &c) in coords.iter().enumerate() {
                let mut swapped = vals.clone();
                swapped[slot] = vecs[c].1.as_slice();
                grad[c] += a.contract(&swapped);
            }
        }
    }
    (value, grad)
}

fn default_bounds(f: &LocalFunction, m: usize) -> Result<BoundSequence> {
    let w = f.window();
    let horizon = (w.r * (w.dim as f64).sqrt()).ceil() as usize + 1;
    BoundSequence::constant(m, horizon)
}

/// Both gaps for each `(m, N)` pair on a shared sample.
///
/// Without explicit bounds `a_r = m` is used up to a horizon covering the
/// window. `f̂_0` is carried exactly.
pub fn core_approximation_on(
    f: &LocalFunction,
    bounds: Option<&BoundSequence>,
    pairs: &[(usize, usize)],
    samples: &[Configuration],
    grad_step: f64,
) -> Result<Vec<CoreApproxRow>> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument(format!("at least two samples are required, got {}", samples.len())));
    }
    let w = f.window();
    let mut rows = Vec::with_capacity(pairs.len());
    for &(m, bern_n) in pairs {
        let a = match bounds {
            Some(a) => a.clone(),
            None => default_bounds(f, m)?,
        };
        let approx = (1..=m)
            .map(|n| {
                let hat = |x: &[f64]| {
                    let (v, abs) = mobius_transform_unchecked(f, x).expect("bounded point count");
                    snap(v, abs)
                };
                bernstein_symmetric_approx(hat, w.r, bern_n, n, w.dim)
            })
            .collect::<Result<Vec<_>>>()?;
        let per_sample = samples
            .par_iter()
            .map(|xi| {
                let g1 = |c: &Configuration| -> Result<f64> { Ok((1.0 - cutoff(c, &a)) * truncation_residual(f, m, c)?) };
                let v1 = g1(xi)?;
                let d1 = half_square(&fd_gradient(xi, None, grad_step, g1)?);

                let local = xi.restrict_to_window(&w);
                let fm = |c: &Configuration| truncate_with_bound(f, m, c).map(|(v, _)| v);
                let (poly, poly_grad) = polynomial_part(&approx, &local);
                let v2 = fm(xi)? - f.family_value(&[]) - poly;
                let fm_grad = fd_gradient(&local, None, grad_step, fm)?;
                let g2: Vec<f64> = fm_grad.iter().zip(&poly_grad).map(|(a, b)| a - b).collect();
                Ok((v1, d1, v2, half_square(&g2)))
            })
            .collect::<Result<Vec<_>>>()?;
        let col = |i: usize| -> Vec<f64> {
            per_sample.iter().map(|t: &(f64, f64, f64, f64)| [t.0, t.1, t.2, t.3][i]).collect()
        };
        rows.push(CoreApproxRow {
            m,
            bern_n,
            gap1: H1Estimate::from_parts(&col(0), &col(1))?,
            gap2: H1Estimate::from_parts(&col(2), &col(3))?,
        });
    }
    Ok(rows)
}

pub fn core_approximation_report<S: ConfigurationSampler + ?Sized>(
    f: &LocalFunction,
    bounds: Option<&BoundSequence>,
    pairs: &[(usize, usize)],
    sampler: &S,
    replicas: usize,
    seed: u64,
) -> Result<Vec<CoreApproxRow>> {
    core_approximation_on(f, bounds, pairs, &draw_samples(sampler, replicas, seed), DEFAULT_GRAD_STEP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configspace::{PoissonSampler, TestFunction, Window};

    fn w() -> Window {
        Window::new(1.0, 1).unwrap()
    }

    #[test]
    fn counting_has_exact_first_truncation() {
        let f = LocalFunction::counting(w());
        let s = PoissonSampler::new(2.0, 1.5, 1).unwrap();
        let rows = core_approximation_report(&f, None, &[(1, 8)], &s, 200, 3).unwrap();
        assert_eq!(rows[0].gap1.norm, 0.0);
    }

    #[test]
    fn zeroth_truncation_leaves_a_gap() {
        let f = LocalFunction::additive(w(), TestFunction::bump(&[0.0], 1.0, 1.0).unwrap()).unwrap();
        let s = PoissonSampler::new(2.0, 1.5, 1).unwrap();
        let rows = core_approximation_report(&f, None, &[(0, 8)], &s, 200, 3).unwrap();
        assert!(rows[0].gap1.norm > 0.0);
        assert_eq!(rows[0].gap2.norm, 0.0);
    }

    #[test]
    fn quadratic_gaps_shrink() {
        let f = LocalFunction::quadratic(w(), TestFunction::bump(&[0.0], 1.0, 1.0).unwrap()).unwrap();
        let s = PoissonSampler::new(2.0, 1.5, 1).unwrap();
        let rows = core_approximation_report(&f, None, &[(2, 8), (2, 32)], &s, 300, 8).unwrap();
        assert_eq!(rows[0].gap1.norm, 0.0);
        assert!(rows[1].gap2.norm < rows[0].gap2.norm, "{rows:?}");
    }
}
