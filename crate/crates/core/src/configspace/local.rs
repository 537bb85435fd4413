use std::sync::Arc;

use super::configuration::{Configuration, Window};
use super::polynomial::PolynomialFunctional;
use crate::error::{Error, Result};

/// `f̌_k` evaluated on `k` points given as a flat coordinate buffer.
pub type FamilyFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Gradient of `f̌_k` with respect to every coordinate, same layout.
pub type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

pub const DEFAULT_GRAD_STEP: f64 = 1e-5;

/// A smooth, compactly supported test function on `R^d`.
#[derive(Clone)]
pub struct TestFunction {
    dim: usize,
    reach: f64,
    value: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    gradient: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction").field("dim", &self.dim).field("reach", &self.reach).finish()
    }
}

impl TestFunction {
    /// `reach` bounds the support in sup-norm: `φ(x) = 0` once `max |x_i| ≥ reach`.
    pub fn new<V, G>(dim: usize, reach: f64, value: V, gradient: G) -> Self
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self { dim, reach, value: Arc::new(value), gradient: Arc::new(gradient) }
    }

    /// `A · exp(1 - 1/(1 - |x-c|²/ρ²))` inside the ball of radius `ρ`, zero outside.
    pub fn bump(center: &[f64], radius: f64, amplitude: f64) -> Result<Self> {
        if !(radius > 0.0) || center.is_empty() {
            return Err(Error::InvalidArgument(format!("bump needs radius > 0, got {radius}")));
        }
        let c = center.to_vec();
        let c2 = c.clone();
        let rho2 = radius * radius;
        let reach = center.iter().fold(0.0f64, |m, x| m.max(x.abs())) + radius;
        let value = move |x: &[f64]| {
            let s = x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / rho2;
            if s >= 1.0 {
                0.0
            } else {
                amplitude * (1.0 - 1.0 / (1.0 - s)).exp()
            }
        };
        let gradient = move |x: &[f64]| {
            let s = x.iter().zip(&c2).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / rho2;
            if s >= 1.0 {
                return vec![0.0; x.len()];
            }
            let phi = amplitude * (1.0 - 1.0 / (1.0 - s)).exp();
            let k = -phi * 2.0 / (rho2 * (1.0 - s).powi(2));
            x.iter().zip(&c2).map(|(a, b)| k * (a - b)).collect()
        };
        Ok(Self::new(center.len(), reach, value, gradient))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn reach(&self) -> f64 {
        self.reach
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }

    /// `⟨φ, ξ⟩` over a flat point buffer.
    pub fn pair(&self, coords: &[f64]) -> f64 {
        coords.chunks(self.dim).map(|p| self.value(p)).sum()
    }
}

/// A local function `f(ξ) = f̌_k(x_1..x_k)` where `x_1..x_k` are the points of
/// `ξ` inside the window, in canonical order.
#[derive(Clone)]
pub struct LocalFunction {
    window: Window,
    family: FamilyFn,
    gradient: Option<GradientFn>,
    horizon: usize,
    smooth: bool,
}

impl std::fmt::Debug for LocalFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LocalFunction")
            .field("window", &self.window)
            .field("analytic_gradient", &self.gradient.is_some())
            .field("horizon", &self.horizon)
            .field("smooth", &self.smooth)
            .finish()
    }
}

impl LocalFunction {
    pub fn custom<F>(window: Window, family: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self { window, family: Arc::new(family), gradient: None, horizon: usize::MAX, smooth: true }
    }

    pub fn with_gradient<G>(mut self, gradient: G) -> Self
    where
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    /// Largest number of in-window points the family is defined for.
    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_smooth(mut self, smooth: bool) -> Self {
        self.smooth = smooth;
        self
    }

    pub fn constant(window: Window, c: f64) -> Self {
        Self::custom(window, move |_| c).with_gradient(|x| vec![0.0; x.len()])
    }

    /// `f̌_k = k`.
    pub fn counting(window: Window) -> Self {
        let d = window.dim;
        Self::custom(window, move |x| (x.len() / d) as f64)
            .with_gradient(|x| vec![0.0; x.len()])
            .with_smooth(false)
    }

    /// `⟨φ, ξ⟩`.
    pub fn additive(window: Window, phi: TestFunction) -> Result<Self> {
        check_phi(&window, &phi)?;
        let d = window.dim;
        let g = phi.clone();
        Ok(Self::custom(window, move |x| phi.pair(x))
            .with_gradient(move |x| x.chunks(d).flat_map(|p| g.gradient(p)).collect()))
    }

    /// `⟨φ, ξ⟩²`.
    pub fn quadratic(window: Window, phi: TestFunction) -> Result<Self> {
        check_phi(&window, &phi)?;
        let d = window.dim;
        let g = phi.clone();
        Ok(Self::custom(window, move |x| phi.pair(x).powi(2)).with_gradient(move |x| {
            let s = 2.0 * g.pair(x);
            x.chunks(d).flat_map(|p| g.gradient(p)).map(|v| s * v).collect()
        }))
    }

    pub fn from_polynomial(window: Window, functional: PolynomialFunctional) -> Result<Self> {
        for phi in functional.phis() {
            check_phi(&window, phi)?;
        }
        let g = functional.clone();
        Ok(Self::custom(window, move |x| functional.eval_flat(x)).with_gradient(move |x| g.gradient_flat(x)))
    }

    pub fn sum(&self, other: &LocalFunction) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn difference(&self, other: &LocalFunction) -> Result<Self> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &LocalFunction, sign: f64) -> Result<Self> {
        if self.window.dim != other.window.dim {
            return Err(Error::InvalidArgument("local functions of different dimension".into()));
        }
        let window = self.window.union(&other.window);
        let (a, b) = (self.clone(), other.clone());
        let f = move |x: &[f64]| a.eval_in(x) + sign * b.eval_in(x);
        let mut out = Self::custom(window, f).with_horizon(self.horizon.min(other.horizon));
        out.smooth = self.smooth && other.smooth;
        if self.gradient.is_some() && other.gradient.is_some() {
            let (a, b) = (self.clone(), other.clone());
            out = out.with_gradient(move |x| {
                let ga = a.grad_in(x);
                let gb = b.grad_in(x);
                ga.iter().zip(&gb).map(|(u, v)| u + sign * v).collect()
            });
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> Self {
        let a = self.clone();
        let mut out = Self::custom(self.window, move |x| c * (a.family)(x)).with_horizon(self.horizon);
        out.smooth = self.smooth;
        if let Some(g) = self.gradient.clone() {
            out = out.with_gradient(move |x| g(x).into_iter().map(|v| c * v).collect());
        }
        out
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.window.dim
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    /// `f̌_k` on points assumed to lie in the window.
    pub fn family_value(&self, coords: &[f64]) -> f64 {
        (self.family)(coords)
    }

    /// Evaluates after dropping the points outside this function's own window.
    fn eval_in(&self, coords: &[f64]) -> f64 {
        let d = self.window.dim;
        let kept: Vec<f64> =
            coords.chunks(d).filter(|p| self.window.contains(p)).flatten().copied().collect();
        (self.family)(&kept)
    }

    fn grad_in(&self, coords: &[f64]) -> Vec<f64> {
        let d = self.window.dim;
        let g = self.gradient.as_ref().expect("analytic gradient");
        let mask: Vec<bool> = coords.chunks(d).map(|p| self.window.contains(p)).collect();
        let kept: Vec<f64> =
            coords.chunks(d).zip(&mask).filter(|(_, &m)| m).flat_map(|(p, _)| p.iter().copied()).collect();
        let gk = g(&kept);
        let mut out = vec![0.0; coords.len()];
        let mut src = gk.chunks(d);
        for (dst, &m) in out.chunks_mut(d).zip(&mask) {
            if m {
                dst.copy_from_slice(src.next().unwrap());
            }
        }
        out
    }

    /// `f(ξ) = f̌_k(ξ_K)`.
    pub fn evaluate(&self, xi: &Configuration) -> Result<f64> {
        let local = xi.restrict_to_window(&self.window);
        if local.len() > self.horizon {
            return Err(Error::InvalidArgument(format!(
                "{} points in the window exceed the family horizon {}",
                local.len(),
                self.horizon
            )));
        }
        Ok((self.family)(local.coords()))
    }

    /// Whether adding `outside` (a point not in the window) leaves `f` unchanged.
    pub fn spot_check_consistency(&self, xi: &Configuration, outside: &[f64]) -> Result<bool> {
        if self.window.contains(outside) {
            return Err(Error::InvalidArgument("spot-check point lies inside the window".into()));
        }
        Ok(self.evaluate(xi)? == self.evaluate(&xi.with_point(outside)?)?)
    }

    /// Compares `f̌_k` on the in-window points of `xi` against its value on the
    /// reversed and rotated orderings.
    pub fn spot_check_permutation(&self, xi: &Configuration, tol: f64) -> bool {
        let local = xi.restrict_to_window(&self.window);
        let pts: Vec<&[f64]> = local.points().collect();
        let base = (self.family)(&pts.concat());
        let mut rev = pts.clone();
        rev.reverse();
        let mut rot = pts.clone();
        if !rot.is_empty() {
            rot.rotate_left(1);
        }
        [rev, rot].iter().all(|p| {
            let v = (self.family)(&p.concat());
            (v - base).abs() <= tol * (1.0 + base.abs())
        })
    }
}

fn check_phi(window: &Window, phi: &TestFunction) -> Result<()> {
    if phi.dim() != window.dim {
        return Err(Error::InvalidArgument("test function dimension differs from window".into()));
    }
    if phi.reach() > window.r * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "test function support (reach {}) leaves the window [-{}, {}]",
            phi.reach(),
            window.r,
            window.r
        )));
    }
    Ok(())
}

/// `f(ξ)` for a local function.
pub fn evaluate_local(f: &LocalFunction, xi: &Configuration) -> Result<f64> {
    f.evaluate(xi)
}

/// Gradient of `f` with respect to each coordinate of the points of `xi`
/// inside `window`, flat in canonical order.
pub fn gradient(f: &LocalFunction, xi: &Configuration, window: &Window, grad_step: f64) -> Result<Vec<f64>> {
    let local = xi.restrict_to_window(window);
    if f.gradient.is_some() {
        return Ok(f.grad_in(local.coords()));
    }
    let outside: Vec<f64> =
        xi.points().filter(|p| !window.contains(p)).flatten().copied().collect();
    let base = local.coords().to_vec();
    let dim = xi.dim();
    let eval = |coords: &[f64]| -> Result<f64> {
        let mut all = coords.to_vec();
        all.extend_from_slice(&outside);
        f.evaluate(&Configuration::from_flat(dim, all)?)
    };
    let mut out = Vec::with_capacity(base.len());
    let mut work = base.clone();
    for i in 0..base.len() {
        let h = grad_step * (1.0 + base[i].abs());
        work[i] = base[i] + h;
        let up = eval(&work)?;
        work[i] = base[i] - h;
        let down = eval(&work)?;
        work[i] = base[i];
        out.push((up - down) / (2.0 * h));
    }
    Ok(out)
}

/// `𝔻(f, g)(ξ) = ½ Σ_i ∇_i f · ∇_i g` over the points of `ξ` in the union window.
pub fn square_field(f: &LocalFunction, g: &LocalFunction, xi: &Configuration, grad_step: f64) -> Result<f64> {
    if f.dim() != xi.dim() || g.dim() != xi.dim() {
        return Err(Error::InvalidArgument("dimension mismatch in square field".into()));
    }
    let window = f.window.union(&g.window);
    let gf = gradient(f, xi, &window, grad_step)?;
    let gg = if Arc::ptr_eq(&f.family, &g.family) { gf.clone() } else { gradient(g, xi, &window, grad_step)? };
    Ok(0.5 * gf.iter().zip(&gg).map(|(a, b)| a * b).sum::<f64>())
}
