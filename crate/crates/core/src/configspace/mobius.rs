use std::sync::Arc;

use super::configuration::{Configuration, Window};
use super::local::LocalFunction;
use crate::error::{Error, Result};

/// Largest point count for subset enumeration.
pub const MAX_POINTS: usize = 24;

fn check_size(n: usize) -> Result<()> {
    if n > MAX_POINTS {
        return Err(Error::InvalidArgument(format!("subset enumeration limited to {MAX_POINTS} points, got {n}")));
    }
    Ok(())
}

fn subset(points: &[f64], dim: usize, mask: u32, buf: &mut Vec<f64>) {
    buf.clear();
    for (i, p) in points.chunks(dim).enumerate() {
        if mask >> i & 1 == 1 {
            buf.extend_from_slice(p);
        }
    }
}

/// `f̂_n(x_1..x_n) = Σ_{A ⊂ {1..n}} (-1)^{n-|A|} f̌_{|A|}(x_A)`, together with
/// `Σ |f̌_{|A|}(x_A)|` which bounds the rounding error of the alternating sum.
/// Coincident points are accepted.
pub fn mobius_transform_unchecked(f: &LocalFunction, points: &[f64]) -> Result<(f64, f64)> {
    let d = f.dim();
    let n = points.len() / d;
    check_size(n)?;
    let mut buf = Vec::with_capacity(points.len());
    let (mut sum, mut abs) = (0.0, 0.0);
    for mask in 0..(1u32 << n) {
        subset(points, d, mask, &mut buf);
        let v = f.family_value(&buf);
        abs += v.abs();
        if (n - mask.count_ones() as usize) % 2 == 0 {
            sum += v;
        } else {
            sum -= v;
        }
    }
    Ok((sum, abs))
}

/// `f̂_n` at `n` distinct points, given as a flat buffer of `n·d` coordinates.
pub fn mobius_transform(f: &LocalFunction, points: &[f64]) -> Result<f64> {
    let d = f.dim();
    if points.len() % d != 0 {
        return Err(Error::InvalidArgument("point buffer does not match dimension".into()));
    }
    let pts: Vec<&[f64]> = points.chunks(d).collect();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i] == pts[j] {
                return Err(Error::Domain(format!("points {i} and {j} coincide")));
            }
        }
    }
    mobius_transform_unchecked(f, points).map(|(v, _)| v)
}

type HatFn = Arc<dyn Fn(&[f64]) -> Result<f64> + Send + Sync>;

/// The family `{f̂_n}` of a local function.
#[derive(Clone)]
pub struct MobiusFamily {
    window: Window,
    hat: HatFn,
}

impl MobiusFamily {
    pub fn of(f: &LocalFunction) -> Self {
        let g = f.clone();
        Self { window: f.window(), hat: Arc::new(move |x| mobius_transform(&g, x)) }
    }

    /// A family given directly, `hat(points)` returning `f̂_n` on `n` points.
    pub fn from_fn<F>(window: Window, hat: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self { window, hat: Arc::new(move |x| Ok(hat(x))) }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn value(&self, points: &[f64]) -> Result<f64> {
        (self.hat)(points)
    }
}

/// `Σ_{η ≺ ξ_K, η(S) ≤ cap} f̂_{η(S)}(η)`.
fn reconstruct_capped(family: &MobiusFamily, xi: &Configuration, cap: usize) -> Result<f64> {
    let local = xi.restrict_to_window(&family.window);
    if local.has_duplicates() {
        return Err(Error::Domain("configuration has coincident points".into()));
    }
    let (d, k) = (local.dim(), local.len());
    check_size(k)?;
    let mut buf = Vec::new();
    let mut total = 0.0;
    for mask in 0..(1u32 << k) {
        if mask.count_ones() as usize <= cap {
            subset(local.coords(), d, mask, &mut buf);
            total += family.value(&buf)?;
        }
    }
    Ok(total)
}

/// Rebuilds `f(ξ)` from its Möbius family.
pub fn mobius_reconstruct(family: &MobiusFamily, xi: &Configuration) -> Result<f64> {
    reconstruct_capped(family, xi, usize::MAX)
}

/// Brute-force `f_[m]` through the Möbius family.
pub fn truncate_by_enumeration(f: &LocalFunction, m: usize, xi: &Configuration) -> Result<f64> {
    reconstruct_capped(&MobiusFamily::of(f), xi, m)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k.min(n - k)).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `f_[m](ξ)` with the rounding bound `Σ |c_A f̌(x_A)|` of the sum.
///
/// Regrouping the Möbius sum by subsets gives
/// `f_[m] = Σ_{|A| ≤ m} c_{|A|} f̌(x_A)` with `c_s = (-1)^{m-s} C(k-s-1, m-s)`
/// for `s < k`, so only subsets of size at most `m` are visited.
pub fn truncate_with_bound(f: &LocalFunction, m: usize, xi: &Configuration) -> Result<(f64, f64)> {
    let local = xi.restrict_to_window(&f.window());
    let (d, k) = (local.dim(), local.len());
    if m >= k {
        let v = f.family_value(local.coords());
        return Ok((v, v.abs()));
    }
    check_size(k)?;
    let coef: Vec<f64> = (0..=m)
        .map(|s| {
            let c = binomial(k - s - 1, m - s);
            if (m - s) % 2 == 0 { c } else { -c }
        })
        .collect();
    let mut buf = Vec::new();
    let (mut sum, mut abs) = (0.0, 0.0);
    for mask in 0..(1u32 << k) {
        let s = mask.count_ones() as usize;
        if s <= m && coef[s] != 0.0 {
            subset(local.coords(), d, mask, &mut buf);
            let v = coef[s] * f.family_value(&buf);
            sum += v;
            abs += v.abs();
        }
    }
    Ok((sum, abs))
}

/// `f_[m](ξ) = Σ_{n ≤ m} Σ_{η ≺ ξ_K, η(S) = n} f̂_n(η)`.
pub fn truncate(f: &LocalFunction, m: usize, xi: &Configuration) -> Result<f64> {
    truncate_with_bound(f, m, xi).map(|(v, _)| v)
}

/// `f_[m]` as a local function on the same window.
pub fn truncated_function(f: &LocalFunction, m: usize) -> LocalFunction {
    let g = f.clone();
    let w = f.window();
    LocalFunction::custom(w, move |x| {
        let xi = Configuration::from_flat(w.dim, x.to_vec()).expect("finite coordinates");
        truncate(&g, m, &xi).expect("window point count within enumeration limit")
    })
    .with_horizon(MAX_POINTS)
    .with_smooth(f.is_smooth())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configspace::TestFunction;
    use rand::{Rng, SeedableRng};

    fn w() -> Window {
        Window::new(1.0, 1).unwrap()
    }

    fn phi() -> TestFunction {
        TestFunction::bump(&[0.1], 0.85, 1.0).unwrap()
    }

    #[test]
    fn counting_transform() {
        let f = LocalFunction::counting(w());
        assert_eq!(mobius_transform(&f, &[0.3]).unwrap(), 1.0);
        assert_eq!(mobius_transform(&f, &[0.3, -0.2]).unwrap(), 0.0);
        assert_eq!(mobius_transform(&f, &[0.3, -0.2, 0.5]).unwrap(), 0.0);
        assert_eq!(mobius_transform(&f, &[]).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_second_transform() {
        let p = phi();
        let f = LocalFunction::quadratic(w(), p.clone()).unwrap();
        let (x, y) = (0.2, -0.4);
        let want = 2.0 * p.value(&[x]) * p.value(&[y]);
        assert!((mobius_transform(&f, &[x, y]).unwrap() - want).abs() < 1e-15);
        assert!(mobius_transform(&f, &[x, y, 0.5]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn zero_points_give_f0() {
        let f = LocalFunction::constant(w(), 1.75);
        assert_eq!(mobius_transform(&f, &[]).unwrap(), 1.75);
        let fam = MobiusFamily::of(&f);
        assert_eq!(mobius_reconstruct(&fam, &Configuration::empty(1)).unwrap(), 1.75);
    }

    #[test]
    fn duplicates_rejected() {
        let f = LocalFunction::counting(w());
        assert!(matches!(mobius_transform(&f, &[0.3, 0.3]), Err(Error::Domain(_))));
        let (v, _) = mobius_transform_unchecked(&f, &[0.3, 0.3]).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn round_trip_and_truncation() {
        let p = phi();
        let fams = [
            LocalFunction::counting(w()),
            LocalFunction::additive(w(), p.clone()).unwrap(),
            LocalFunction::quadratic(w(), p.clone()).unwrap(),
            LocalFunction::custom(w(), |x| x.iter().map(|v| v.sin()).product::<f64>() + x.len() as f64),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let k = rng.random_range(0..=6);
            let mut xs: Vec<f64> = (0..k).map(|_| rng.random_range(-0.99..0.99)).collect();
            xs.push(1.7);
            let xi = Configuration::on_line(&xs).unwrap();
            for f in &fams {
                let direct = f.evaluate(&xi).unwrap();
                let back = mobius_reconstruct(&MobiusFamily::of(f), &xi).unwrap();
                assert!((direct - back).abs() < 1e-12);
                for m in 0..=7 {
                    let a = truncate(f, m, &xi).unwrap();
                    let b = truncate_by_enumeration(f, m, &xi).unwrap();
                    assert!((a - b).abs() < 1e-12, "m = {m}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn truncation_edge_cases() {
        let f = LocalFunction::counting(w());
        let xi = Configuration::on_line(&[-0.5, 0.1, 0.6, 0.9]).unwrap();
        assert_eq!(truncate(&f, 0, &xi).unwrap(), 0.0);
        assert!((truncate(&f, 1, &xi).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(truncate(&f, 9, &xi).unwrap(), 4.0);
        let g = truncated_function(&f, 1);
        assert!((g.evaluate(&xi).unwrap() - 4.0).abs() < 1e-12);
    }
}
