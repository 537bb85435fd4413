//! Sine and Airy kernels, static and space-time extended.
//!
//! The extended kernels are integrals over a spectral variable `u`. They are
//! evaluated with composite Gauss–Legendre panels whose width follows the
//! local oscillation of the integrand, and the infinite tails are cut where
//! the integrand drops below [`TAIL_CUTOFF`].

use std::f64::consts::{FRAC_1_PI, PI};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{ensure_finite, Error, Result};
use crate::specfun::{airy_ai_and_prime, gauss_legendre, QuadratureRule};

/// Integrand magnitude below which semi-infinite tails are dropped.
pub const TAIL_CUTOFF: f64 = 1e-16;

/// Below this separation the diagonal closed forms replace the ratio.
pub const DIAGONAL_BAND: f64 = 1e-6;

/// Per-panel Gauss–Legendre order used by the free functions.
pub const DEFAULT_PANEL_ORDER: usize = 16;

const MAX_PANELS: usize = 200_000;

/// -ln(TAIL_CUTOFF)
const LOG_CUTOFF: f64 = 36.841_361_487_904_734;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Sine,
    Airy,
    ExtendedSine,
    ExtendedAiry,
    Custom,
}

pub type StaticKernelFn = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;
pub type ExtendedKernelFn = Arc<dyn Fn(f64, f64, f64, f64) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
enum Evaluator {
    Static(StaticKernelFn),
    Extended(ExtendedKernelFn),
}

/// A kernel ready for evaluation: either `K(x, y)` or `K(s, x; t, y)`.
#[derive(Clone)]
pub struct KernelSpec {
    kind: KernelKind,
    eval: Evaluator,
    quad_order: usize,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("kind", &self.kind)
            .field("extended", &self.is_extended())
            .field("quad_order", &self.quad_order)
            .finish()
    }
}

impl KernelSpec {
    pub fn sine() -> Self {
        Self { kind: KernelKind::Sine, eval: Evaluator::Static(Arc::new(sine_kernel)), quad_order: 0 }
    }

    pub fn airy() -> Self {
        Self { kind: KernelKind::Airy, eval: Evaluator::Static(Arc::new(airy_kernel)), quad_order: 0 }
    }

    pub fn extended_sine(panel_order: usize) -> Result<Self> {
        let rule = Arc::new(reference_rule(panel_order)?);
        Ok(Self {
            kind: KernelKind::ExtendedSine,
            eval: Evaluator::Extended(Arc::new(move |s, x, t, y| extended_sine_with(&rule, s, x, t, y))),
            quad_order: panel_order,
        })
    }

    pub fn extended_airy(panel_order: usize) -> Result<Self> {
        let rule = Arc::new(reference_rule(panel_order)?);
        Ok(Self {
            kind: KernelKind::ExtendedAiry,
            eval: Evaluator::Extended(Arc::new(move |s, x, t, y| extended_airy_with(&rule, s, x, t, y))),
            quad_order: panel_order,
        })
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self { kind: KernelKind::Custom, eval: Evaluator::Static(Arc::new(move |x, y| Ok(f(x, y)))), quad_order: 0 }
    }

    pub fn custom_extended<F>(f: F) -> Self
    where
        F: Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: KernelKind::Custom,
            eval: Evaluator::Extended(Arc::new(move |s, x, t, y| Ok(f(s, x, t, y)))),
            quad_order: 0,
        }
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn is_extended(&self) -> bool {
        matches!(self.eval, Evaluator::Extended(_))
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    /// Equal-time evaluation `K(x, y)`; extended kernels are read at `s = t = 0`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        match &self.eval {
            Evaluator::Static(f) => f(x, y),
            Evaluator::Extended(f) => f(0.0, x, 0.0, y),
        }
    }

    /// Space-time evaluation. A static kernel only answers at equal times.
    pub fn eval_extended(&self, s: f64, x: f64, t: f64, y: f64) -> Result<f64> {
        match &self.eval {
            Evaluator::Extended(f) => f(s, x, t, y),
            Evaluator::Static(f) if s == t => f(x, y),
            Evaluator::Static(_) => {
                Err(Error::Domain(format!("static {:?} kernel evaluated at distinct times {s}, {t}", self.kind)))
            }
        }
    }
}

fn reference_rule(order: usize) -> Result<QuadratureRule> {
    gauss_legendre(order, -1.0, 1.0)
}

fn default_rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| reference_rule(DEFAULT_PANEL_ORDER).expect("positive order"))
}

/// `sin(x - y) / (π (x - y))`.
pub fn sine_kernel(x: f64, y: f64) -> Result<f64> {
    ensure_finite("x", x)?;
    ensure_finite("y", y)?;
    let d = x - y;
    if d.abs() < DIAGONAL_BAND {
        Ok(FRAC_1_PI * (1.0 - d * d / 6.0))
    } else {
        Ok(d.sin() / (PI * d))
    }
}

/// `(Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y)`, with `Ai'(x)^2 - x Ai(x)^2` on the diagonal.
pub fn airy_kernel(x: f64, y: f64) -> Result<f64> {
    let d = x - y;
    if d.abs() < DIAGONAL_BAND {
        // K is symmetric, so reading the diagonal at the midpoint is O(d^2) accurate.
        let m = 0.5 * (x + y);
        let (a, ap) = airy_ai_and_prime(m)?;
        return Ok(ap * ap - m * a * a);
    }
    let (ax, apx) = airy_ai_and_prime(x)?;
    let (ay, apy) = airy_ai_and_prime(y)?;
    Ok((ax * apy - apx * ay) / d)
}

/// Extended sine kernel `K(s, x; t, y)` with the default panel rule.
pub fn extended_sine(s: f64, x: f64, t: f64, y: f64) -> Result<f64> {
    extended_sine_with(default_rule(), s, x, t, y)
}

/// Extended Airy kernel `K(s, x; t, y)` with the default panel rule.
pub fn extended_airy(s: f64, x: f64, t: f64, y: f64) -> Result<f64> {
    extended_airy_with(default_rule(), s, x, t, y)
}

/// Integrates `f` over `[lo, hi]` with panels of width `width(u)` taken at the
/// panel's left end.
fn panel_integral<W, F>(rule: &QuadratureRule, lo: f64, hi: f64, width: W, mut f: F) -> Result<f64>
where
    W: Fn(f64) -> f64,
    F: FnMut(f64) -> Result<f64>,
{
    let mut total = 0.0;
    let mut left = lo;
    let mut panels = 0usize;
    while left < hi {
        let right = (left + width(left)).min(hi);
        let half = 0.5 * (right - left);
        let mid = left + half;
        for (t, w) in rule.iter() {
            total += half * w * f(mid + half * t)?;
        }
        left = right;
        panels += 1;
        if panels > MAX_PANELS {
            return Err(Error::Convergence(format!(
                "tail quadrature needs more than {MAX_PANELS} panels on [{lo}, {hi}]"
            )));
        }
    }
    Ok(total)
}

fn check_all_finite(s: f64, x: f64, t: f64, y: f64) -> Result<()> {
    ensure_finite("s", s)?;
    ensure_finite("x", x)?;
    ensure_finite("t", t)?;
    ensure_finite("y", y)
}

fn extended_sine_with(rule: &QuadratureRule, s: f64, x: f64, t: f64, y: f64) -> Result<f64> {
    check_all_finite(s, x, t, y)?;
    let tau = t - s;
    let d = y - x;
    let osc_width = |_: f64| (4.0 / d.abs().max(1e-300)).min(1.0);
    if tau >= 0.0 {
        let integral = panel_integral(rule, 0.0, 1.0, osc_width, |u| {
            Ok((0.5 * u * u * tau).exp() * (u * d).cos())
        })?;
        return Ok(FRAC_1_PI * integral);
    }
    // Gaussian factor exp(u^2 tau / 2) falls below the cutoff at u = upper.
    let upper = (2.0 * LOG_CUTOFF / -tau).sqrt();
    if upper <= 1.0 {
        return Ok(0.0);
    }
    let width = |u: f64| osc_width(u).min(10.0 / (u * -tau));
    let integral = panel_integral(rule, 1.0, upper, width, |u| Ok((0.5 * u * u * tau).exp() * (u * d).cos()))?;
    Ok(-FRAC_1_PI * integral)
}

/// Panel width that resolves the Airy oscillation near `z = u + lowest`.
fn airy_width(u: f64, lowest: f64) -> f64 {
    let depth = (-(u + lowest)).max(0.0);
    (2.0 / (1.0 + depth).sqrt()).min(1.0)
}

fn extended_airy_with(rule: &QuadratureRule, s: f64, x: f64, t: f64, y: f64) -> Result<f64> {
    check_all_finite(s, x, t, y)?;
    let tau = t - s;
    let lowest = x.min(y);
    let integrand = |u: f64| -> Result<f64> {
        let (ax, _) = airy_ai_and_prime(u + x)?;
        let (ay, _) = airy_ai_and_prime(u + y)?;
        Ok((-0.5 * u * tau).exp() * ax * ay)
    };
    if tau >= 0.0 {
        // Ai(z)^2 < 1e-17 for z > 9, so the product has died by u = 9 - lowest.
        let mut upper = (9.0 - lowest).max(1.0);
        if tau > 0.0 {
            upper = upper.min((2.0 * LOG_CUTOFF / tau).max(1.0));
        }
        return panel_integral(rule, 0.0, upper, |u| airy_width(u, lowest), integrand);
    }
    // exp(-u tau / 2) with u < 0 decays like exp(-|u| |tau| / 2); the Airy
    // factors only oscillate there, so the weight sets the truncation.
    let depth = 2.0 * LOG_CUTOFF / -tau;
    let integral = panel_integral(rule, 0.0, depth, |v| airy_width(-v - 1.0, lowest), |v| integrand(-v))?;
    Ok(-integral)
}
