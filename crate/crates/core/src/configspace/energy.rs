use rayon::prelude::*;

use super::configuration::Configuration;
use super::local::{square_field, LocalFunction, DEFAULT_GRAD_STEP};
use super::sampler::{draw_samples, ConfigurationSampler};
use crate::error::{Error, Result};
use crate::stats::Estimate;

/// Monte-Carlo estimate of `‖f‖₁ = √(ℰ(f,f) + E f²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H1Estimate {
    pub norm: f64,
    /// Delta-method standard error of `norm`.
    pub norm_se: f64,
    pub energy: Estimate,
    pub second_moment: Estimate,
}

impl H1Estimate {
    /// Builds the estimate from per-sample values `f(ξ_i)` and fields `𝔻(f,f)(ξ_i)`.
    pub fn from_parts(values: &[f64], fields: &[f64]) -> Result<Self> {
        if values.len() < 2 || values.len() != fields.len() {
            return Err(Error::InvalidArgument(format!(
                "need at least two paired samples, got {} values and {} fields",
                values.len(),
                fields.len()
            )));
        }
        let squares: Vec<f64> = values.iter().map(|v| v * v).collect();
        let totals: Vec<f64> = squares.iter().zip(fields).map(|(a, b)| a + b).collect();
        let total = Estimate::from_samples(&totals);
        let norm = total.mean.max(0.0).sqrt();
        let norm_se = if norm > 0.0 { total.std_error / (2.0 * norm) } else { total.std_error.sqrt() };
        Ok(Self {
            norm,
            norm_se,
            energy: Estimate::from_samples(fields),
            second_moment: Estimate::from_samples(&squares),
        })
    }

    /// `‖f‖_{L²}` part alone.
    pub fn l2_norm(&self) -> f64 {
        self.second_moment.mean.max(0.0).sqrt()
    }
}

fn check_count(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("at least two replicas are required, got {m}")));
    }
    Ok(())
}

/// `ℰ(f,g) = E 𝔻(f,g)` on a fixed sample.
pub fn dirichlet_energy_on(
    f: &LocalFunction,
    g: &LocalFunction,
    samples: &[Configuration],
    grad_step: f64,
) -> Result<Estimate> {
    check_count(samples.len())?;
    let fields = samples.par_iter().map(|xi| square_field(f, g, xi, grad_step)).collect::<Result<Vec<_>>>()?;
    Ok(Estimate::from_samples(&fields))
}

pub fn dirichlet_energy_mc<S: ConfigurationSampler + ?Sized>(
    f: &LocalFunction,
    g: &LocalFunction,
    sampler: &S,
    m: usize,
    seed: u64,
) -> Result<Estimate> {
    check_count(m)?;
    dirichlet_energy_on(f, g, &draw_samples(sampler, m, seed), DEFAULT_GRAD_STEP)
}

pub fn h1_norm_on(f: &LocalFunction, samples: &[Configuration], grad_step: f64) -> Result<H1Estimate> {
    check_count(samples.len())?;
    let pairs = samples
        .par_iter()
        .map(|xi| Ok((f.evaluate(xi)?, square_field(f, f, xi, grad_step)?)))
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let (values, fields): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    H1Estimate::from_parts(&values, &fields)
}

pub fn h1_norm_estimate<S: ConfigurationSampler + ?Sized>(
    f: &LocalFunction,
    sampler: &S,
    m: usize,
    seed: u64,
) -> Result<H1Estimate> {
    check_count(m)?;
    h1_norm_on(f, &draw_samples(sampler, m, seed), DEFAULT_GRAD_STEP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configspace::{PoissonSampler, TestFunction, Window};
    use crate::specfun::QuadratureRule;

    fn setup() -> (LocalFunction, TestFunction, PoissonSampler) {
        let w = Window::new(1.0, 1).unwrap();
        let p = TestFunction::bump(&[0.0], 1.0, 1.0).unwrap();
        (LocalFunction::additive(w, p.clone()).unwrap(), p, PoissonSampler::new(2.0, 1.0, 1).unwrap())
    }

    fn integral<F: Fn(f64) -> f64>(f: F) -> f64 {
        QuadratureRule::composite(20, -1.0, 1.0, 40).unwrap().integrate(f)
    }

    #[test]
    fn constant_has_zero_energy() {
        let w = Window::new(1.0, 1).unwrap();
        let c = LocalFunction::constant(w, 2.5);
        let s = PoissonSampler::new(2.0, 1.0, 1).unwrap();
        let e = dirichlet_energy_mc(&c, &c, &s, 200, 1).unwrap();
        assert_eq!(e.mean, 0.0);
        let h = h1_norm_estimate(&c, &s, 200, 1).unwrap();
        assert!((h.norm - 2.5).abs() < 1e-12);
    }

    #[test]
    fn additive_energy_and_norm_match_campbell() {
        let (f, p, s) = setup();
        let lam = 2.0;
        let dphi2 = integral(|x| p.gradient(&[x])[0].powi(2));
        let phi1 = integral(|x| p.value(&[x]));
        let phi2 = integral(|x| p.value(&[x]).powi(2));
        let e = dirichlet_energy_mc(&f, &f, &s, 20000, 5).unwrap();
        assert!(e.within(0.5 * lam * dphi2, 3.0), "{e:?} vs {}", 0.5 * lam * dphi2);
        let h = h1_norm_estimate(&f, &s, 20000, 6).unwrap();
        let want = (lam * phi2 + (lam * phi1).powi(2) + 0.5 * lam * dphi2).sqrt();
        assert!((h.norm - want).abs() <= 3.0 * h.norm_se, "{h:?} vs {want}");
        assert!(h.norm >= h.l2_norm());
    }

    #[test]
    fn energy_is_bilinear_on_shared_sample() {
        let (f, _, _) = setup();
        let w = Window::new(1.0, 1).unwrap();
        let g = LocalFunction::quadratic(w, TestFunction::bump(&[0.3], 0.6, 1.0).unwrap()).unwrap();
        let h = LocalFunction::additive(w, TestFunction::bump(&[-0.2], 0.7, 2.0).unwrap()).unwrap();
        let samples = draw_samples(&PoissonSampler::new(2.0, 1.0, 1).unwrap(), 500, 2);
        let lhs = dirichlet_energy_on(&f.sum(&g).unwrap(), &h, &samples, DEFAULT_GRAD_STEP).unwrap().mean;
        let rhs = dirichlet_energy_on(&f, &h, &samples, DEFAULT_GRAD_STEP).unwrap().mean
            + dirichlet_energy_on(&g, &h, &samples, DEFAULT_GRAD_STEP).unwrap().mean;
        assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn too_few_replicas() {
        let (f, _, s) = setup();
        assert!(dirichlet_energy_mc(&f, &f, &s, 1, 0).is_err());
    }
}
