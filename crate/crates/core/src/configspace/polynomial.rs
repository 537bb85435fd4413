use std::sync::Arc;

use super::configuration::Configuration;
use super::local::TestFunction;
use crate::error::{Error, Result};

/// `Q(u) = Σ c · Π_k u_k^{e_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    terms: Vec<(f64, Vec<u32>)>,
    vars: usize,
}

impl Polynomial {
    pub fn new(vars: usize, terms: Vec<(f64, Vec<u32>)>) -> Result<Self> {
        if terms.iter().any(|(_, e)| e.len() != vars) {
            return Err(Error::InvalidArgument(format!("every monomial needs {vars} exponents")));
        }
        Ok(Self { terms, vars })
    }

    /// `Q(u) = u_1`.
    pub fn identity() -> Self {
        Self { terms: vec![(1.0, vec![1])], vars: 1 }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * u.iter().zip(e).map(|(x, &k)| x.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        (0..self.vars)
            .map(|k| {
                self.terms
                    .iter()
                    .filter(|(_, e)| e[k] > 0)
                    .map(|(c, e)| {
                        let rest: f64 = u
                            .iter()
                            .zip(e)
                            .enumerate()
                            .map(|(i, (x, &p))| if i == k { p as f64 * x.powi(p as i32 - 1) } else { x.powi(p as i32) })
                            .product();
                        c * rest
                    })
                    .sum()
            })
            .collect()
    }
}

type Smooth = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type SmoothGradient = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Outer function of a polynomial functional.
#[derive(Clone)]
pub enum Outer {
    Polynomial(Polynomial),
    Smooth { value: Smooth, gradient: SmoothGradient },
}

impl Outer {
    fn eval(&self, u: &[f64]) -> f64 {
        match self {
            Outer::Polynomial(p) => p.eval(u),
            Outer::Smooth { value, .. } => value(u),
        }
    }

    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        match self {
            Outer::Polynomial(p) => p.gradient(u),
            Outer::Smooth { gradient, .. } => gradient(u),
        }
    }
}

/// `F(ξ) = Q(⟨φ_1, ξ⟩, …, ⟨φ_ℓ, ξ⟩)`.
#[derive(Clone)]
pub struct PolynomialFunctional {
    phis: Vec<TestFunction>,
    outer: Outer,
}

impl std::fmt::Debug for PolynomialFunctional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PolynomialFunctional").field("phis", &self.phis).finish_non_exhaustive()
    }
}

impl PolynomialFunctional {
    pub fn new(phis: Vec<TestFunction>, outer: Outer) -> Result<Self> {
        if phis.is_empty() {
            return Err(Error::InvalidArgument("at least one test function is required".into()));
        }
        if phis.iter().any(|p| p.dim() != phis[0].dim()) {
            return Err(Error::InvalidArgument("test functions of mixed dimension".into()));
        }
        if let Outer::Polynomial(p) = &outer {
            if p.vars() != phis.len() {
                return Err(Error::InvalidArgument(format!(
                    "outer polynomial has {} variables for {} test functions",
                    p.vars(),
                    phis.len()
                )));
            }
        }
        Ok(Self { phis, outer })
    }

    /// Outer function bounded and smooth with its gradient, the `𝒫₀` class.
    pub fn smooth<V, G>(phis: Vec<TestFunction>, value: V, gradient: G) -> Result<Self>
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self::new(phis, Outer::Smooth { value: Arc::new(value), gradient: Arc::new(gradient) })
    }

    pub fn phis(&self) -> &[TestFunction] {
        &self.phis
    }

    pub fn dim(&self) -> usize {
        self.phis[0].dim()
    }

    fn pairings(&self, coords: &[f64]) -> Vec<f64> {
        self.phis.iter().map(|p| p.pair(coords)).collect()
    }

    pub fn eval_flat(&self, coords: &[f64]) -> f64 {
        self.outer.eval(&self.pairings(coords))
    }

    /// `Σ_k ∂_k Q · ∇φ_k(x_i)` for every point, flat.
    pub fn gradient_flat(&self, coords: &[f64]) -> Vec<f64> {
        let dq = self.outer.gradient(&self.pairings(coords));
        let d = self.dim();
        let mut out = vec![0.0; coords.len()];
        for (p, dst) in coords.chunks(d).zip(out.chunks_mut(d)) {
            for (phi, &q) in self.phis.iter().zip(&dq) {
                if q != 0.0 {
                    for (o, g) in dst.iter_mut().zip(phi.gradient(p)) {
                        *o += q * g;
                    }
                }
            }
        }
        out
    }
}

pub fn poly_eval(f: &PolynomialFunctional, xi: &Configuration) -> f64 {
    f.eval_flat(xi.coords())
}

/// Gradient of `F` at each point of `ξ`, one `d`-vector per point.
pub fn poly_gradient(f: &PolynomialFunctional, xi: &Configuration) -> Vec<Vec<f64>> {
    f.gradient_flat(xi.coords()).chunks(xi.dim()).map(|c| c.to_vec()).collect()
}
