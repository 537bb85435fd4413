use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::specfun::QuadratureRule;

/// `∫_{-1}^{1} e^{-1/(1-x²)} dx`.
const BUMP_MASS: f64 = 0.443_993_816_168_079_437_823_048_921_171;

/// Largest tensor `(N+1)^L` an approximation may store.
pub const MAX_GRID: usize = 20_000_000;

const SMOOTHING_ORDER: usize = 32;
const SMOOTHING_PANELS: usize = 4;

fn psi(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp() / BUMP_MASS
    }
}

fn psi_prime(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        let s = 1.0 - u * u;
        psi(u) * (-2.0 * u / (s * s))
    }
}

/// `ψ_N(x) = N ψ(N x)` with `ψ` the unit-mass standard bump on `[-1, 1]`.
pub fn mollifier(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    nf * psi(nf * x)
}

/// `ψ_N'(x)`.
pub fn mollifier_derivative(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    nf * nf * psi_prime(nf * x)
}

fn ln_binomials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for j in 0..n {
        acc += ((n - j) as f64 / (j + 1) as f64).ln();
        out.push(acc);
    }
    out
}

/// `φ_{r,N,j}(x) = (2r)^{-N} C(N,j) (r+x)^j (r-x)^{N-j}` on `[-r, r]`, zero outside.
pub fn bernstein_basis(r: f64, n: usize, j: usize, x: f64) -> f64 {
    if j > n || x.abs() > r {
        return 0.0;
    }
    let t = (r + x) / (2.0 * r);
    if n <= 40 {
        let c = (0..j.min(n - j)).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
        return c * t.powi(j as i32) * (1.0 - t).powi((n - j) as i32);
    }
    if t == 0.0 || t == 1.0 {
        let hit = (t == 0.0 && j == 0) || (t == 1.0 && j == n);
        return if hit { 1.0 } else { 0.0 };
    }
    let lnc = ln_binomials(n)[j];
    (lnc + j as f64 * t.ln() + (n - j) as f64 * (1.0 - t).ln()).exp()
}

fn basis_all(r: f64, lnc: &[f64], x: f64, out: &mut [f64]) {
    let n = lnc.len() - 1;
    out.iter_mut().for_each(|v| *v = 0.0);
    if x.abs() > r {
        return;
    }
    let t = (r + x) / (2.0 * r);
    if t == 0.0 {
        out[0] = 1.0;
        return;
    }
    if t == 1.0 {
        out[n] = 1.0;
        return;
    }
    let (lt, lu) = (t.ln(), (1.0 - t).ln());
    for (j, o) in out.iter_mut().enumerate() {
        *o = (lnc[j] + j as f64 * lt + (n - j) as f64 * lu).exp();
    }
}

/// `(φ_{r,N,j} ∗ ψ_N)(x)` for a single index.
pub fn smoothed_basis(r: f64, n: usize, j: usize, x: f64) -> f64 {
    let lo = (-1.0 / n as f64).max(x - r);
    let hi = (1.0 / n as f64).min(x + r);
    if lo >= hi {
        return 0.0;
    }
    QuadratureRule::composite(SMOOTHING_ORDER, lo, hi, SMOOTHING_PANELS)
        .expect("valid interval")
        .integrate(|y| bernstein_basis(r, n, j, x - y) * mollifier(n, y))
}

/// `g_N(x) = Σ_{j_1..j_L} g(grid_j) Π_ℓ (φ_{r,N,j_ℓ} ∗ ψ_N)(x_ℓ)` with grid
/// nodes `2jr/N - r`, `j = 0..N`.
#[derive(Debug, Clone)]
pub struct BernsteinApprox {
    r: f64,
    n: usize,
    l: usize,
    grid: Option<Vec<f64>>,
    lnc: Vec<f64>,
    rule: QuadratureRule,
}

fn grid_size(n: usize, l: usize) -> Result<usize> {
    (0..l)
        .try_fold(1usize, |acc, _| acc.checked_mul(n + 1))
        .filter(|&s| s <= MAX_GRID)
        .ok_or_else(|| Error::InvalidArgument(format!("Bernstein tensor (N+1)^L with N = {n}, L = {l} is too large")))
}

fn check_params(r: f64, n: usize, l: usize) -> Result<()> {
    if !(r > 0.0) || n == 0 || l == 0 {
        return Err(Error::InvalidArgument(format!("Bernstein approximation needs r > 0, N >= 1, L >= 1, got {r}, {n}, {l}")));
    }
    Ok(())
}

impl BernsteinApprox {
    /// From grid values in row-major order, first coordinate slowest.
    pub fn from_grid(r: f64, n: usize, l: usize, grid: Vec<f64>) -> Result<Self> {
        check_params(r, n, l)?;
        let size = grid_size(n, l)?;
        if grid.len() != size {
            return Err(Error::InvalidArgument(format!("grid has {} values, expected {size}", grid.len())));
        }
        let grid = if grid.iter().all(|&v| v == 0.0) { None } else { Some(grid) };
        let rule = QuadratureRule::composite(SMOOTHING_ORDER, -1.0, 1.0, SMOOTHING_PANELS)?;
        Ok(Self { r, n, l, grid, lnc: ln_binomials(n), rule })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.l
    }

    /// Whether every grid value vanished, so that `g_N ≡ 0`.
    pub fn is_zero(&self) -> bool {
        self.grid.is_none()
    }

    pub fn grid_node(&self, j: usize) -> f64 {
        2.0 * j as f64 * self.r / self.n as f64 - self.r
    }

    /// Values and derivatives of all `N+1` smoothed basis functions at `x`.
    pub fn smoothed_vectors(&self, x: f64) -> (Vec<f64>, Vec<f64>) {
        let m = self.n + 1;
        let (mut val, mut der) = (vec![0.0; m], vec![0.0; m]);
        let nf = self.n as f64;
        let lo = (-1.0 / nf).max(x - self.r);
        let hi = (1.0 / nf).min(x + self.r);
        if lo >= hi {
            return (val, der);
        }
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let mut b = vec![0.0; m];
        for (t, w) in self.rule.iter() {
            let y = mid + half * t;
            let (p, dp) = (mollifier(self.n, y) * w * half, mollifier_derivative(self.n, y) * w * half);
            basis_all(self.r, &self.lnc, x - y, &mut b);
            for j in 0..m {
                val[j] += b[j] * p;
                der[j] += b[j] * dp;
            }
        }
        (val, der)
    }

    /// Contracts the tensor with one length-`N+1` vector per coordinate.
    pub fn contract(&self, vectors: &[&[f64]]) -> f64 {
        let Some(grid) = &self.grid else { return 0.0 };
        let m = self.n + 1;
        let mut cur: Vec<f64> = grid.clone();
        for v in vectors.iter().rev() {
            cur = cur.chunks(m).map(|row| row.iter().zip(v.iter()).map(|(a, b)| a * b).sum()).collect();
        }
        cur[0]
    }

    fn check_point(&self, x: &[f64]) {
        assert_eq!(x.len(), self.l, "point has the wrong number of coordinates");
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.check_point(x);
        if self.is_zero() {
            return 0.0;
        }
        let vs: Vec<Vec<f64>> = x.iter().map(|&xi| self.smoothed_vectors(xi).0).collect();
        let refs: Vec<&[f64]> = vs.iter().map(|v| v.as_slice()).collect();
        self.contract(&refs)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.check_point(x);
        if self.is_zero() {
            return vec![0.0; self.l];
        }
        let pairs: Vec<(Vec<f64>, Vec<f64>)> = x.iter().map(|&xi| self.smoothed_vectors(xi)).collect();
        (0..self.l)
            .map(|k| {
                let refs: Vec<&[f64]> =
                    pairs.iter().enumerate().map(|(i, (v, d))| if i == k { d.as_slice() } else { v.as_slice() }).collect();
                self.contract(&refs)
            })
            .collect()
    }
}

fn multi_index(mut flat: usize, m: usize, l: usize, out: &mut [usize]) {
    for k in (0..l).rev() {
        out[k] = flat % m;
        flat /= m;
    }
    debug_assert_eq!(out.len(), l);
}

/// `g_N` for `g` on `[-r, r]^L`.
pub fn bernstein_mollifier_approx<G>(g: G, r: f64, n: usize, l: usize) -> Result<BernsteinApprox>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    check_params(r, n, l)?;
    let size = grid_size(n, l)?;
    let m = n + 1;
    let node = |j: usize| 2.0 * j as f64 * r / n as f64 - r;
    let grid = (0..size)
        .into_par_iter()
        .map_init(
            || (vec![0usize; l], vec![0.0; l]),
            |(idx, x), flat| {
                multi_index(flat, m, l, idx);
                for (xk, &j) in x.iter_mut().zip(idx.iter()) {
                    *xk = node(j);
                }
                g(x)
            },
        )
        .collect();
    BernsteinApprox::from_grid(r, n, l, grid)
}

/// `g_N` for `g(x_1..x_k)` symmetric under permutations of the `k` points of
/// `R^d`. Only grid cells with non-decreasing point indices are evaluated.
pub fn bernstein_symmetric_approx<G>(g: G, r: f64, n: usize, k: usize, d: usize) -> Result<BernsteinApprox>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let l = k * d;
    check_params(r, n, l)?;
    let size = grid_size(n, l)?;
    let m = n + 1;
    let cell = m.pow(d as u32);
    let node = |j: usize| 2.0 * j as f64 * r / n as f64 - r;
    let point_codes = |flat: usize| -> Vec<usize> {
        let mut codes = vec![0; k];
        let mut f = flat;
        for c in codes.iter_mut().rev() {
            *c = f % cell;
            f /= cell;
        }
        codes
    };
    let canonical = |codes: &[usize]| codes.iter().fold(0usize, |acc, &c| acc * cell + c);
    let mut grid: Vec<f64> = (0..size)
        .into_par_iter()
        .map(|flat| {
            let codes = point_codes(flat);
            if codes.windows(2).any(|w| w[0] > w[1]) {
                return f64::NAN;
            }
            let mut idx = vec![0usize; l];
            multi_index(flat, m, l, &mut idx);
            let x: Vec<f64> = idx.iter().map(|&j| node(j)).collect();
            g(&x)
        })
        .collect();
    for flat in 0..size {
        if grid[flat].is_nan() {
            let mut codes = point_codes(flat);
            codes.sort_unstable();
            grid[flat] = grid[canonical(&codes)];
        }
    }
    BernsteinApprox::from_grid(r, n, l, grid)
}
