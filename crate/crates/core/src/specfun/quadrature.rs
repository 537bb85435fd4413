//! Gauss–Legendre rules on finite intervals.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and positive weights of an interpolatory rule on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `panels` equal sub-intervals of `[a, b]`, each carrying an `order`-point rule.
    pub fn composite(order: usize, a: f64, b: f64, panels: usize) -> Result<Self> {
        if panels == 0 {
            return Err(Error::InvalidArgument("composite rule needs at least one panel".into()));
        }
        let reference = gauss_legendre(order, -1.0, 1.0)?;
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(order * panels);
        let mut weights = Vec::with_capacity(order * panels);
        for p in 0..panels {
            let lo = a + width * p as f64;
            let mid = lo + 0.5 * width;
            for (t, w) in reference.iter() {
                nodes.push(mid + 0.5 * width * t);
                weights.push(0.5 * width * w);
            }
        }
        Ok(Self { a, b, nodes, weights })
    }
}

/// Legendre polynomial P_n and its derivative at `x`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `order`-point Gauss–Legendre rule on `[a, b]`, exact for polynomials of
/// degree up to `2 * order - 1`.
pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::InvalidArgument("quadrature order must be positive".into()));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Interval { a, b });
    }

    let n = order;
    let mut ref_nodes = vec![0.0; n];
    let mut ref_weights = vec![0.0; n];
    if n == 1 {
        ref_weights[0] = 2.0;
    } else {
        // Roots come out descending; fill from the right so nodes ascend.
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            ref_nodes[n - 1 - i] = x;
            ref_nodes[i] = -x;
            ref_weights[n - 1 - i] = w;
            ref_weights[i] = w;
        }
        if n % 2 == 1 {
            ref_nodes[n / 2] = 0.0;
        }
    }

    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok(QuadratureRule {
        a,
        b,
        nodes: ref_nodes.iter().map(|t| mid + half * t).collect(),
        weights: ref_weights.iter().map(|w| half * w).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn two_point_rule_integrates_square() {
        let rule = gauss_legendre(2, -1.0, 1.0).unwrap();
        assert!((rule.integrate(|x| x * x) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn one_point_rule_is_midpoint() {
        let rule = gauss_legendre(1, 0.0, 2.0).unwrap();
        assert_eq!(rule.nodes, vec![1.0]);
        assert_eq!(rule.weights, vec![2.0]);
    }

    #[test]
    fn exponential_on_unit_interval() {
        let rule = gauss_legendre(40, 0.0, 1.0).unwrap();
        assert!((rule.integrate(f64::exp) - (E - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn exact_to_degree_two_n_minus_one() {
        for n in [1usize, 3, 7, 16, 33] {
            let rule = gauss_legendre(n, -0.5, 2.0).unwrap();
            for deg in 0..(2 * n) {
                let exact = (2.0f64.powi(deg as i32 + 1) - (-0.5f64).powi(deg as i32 + 1)) / (deg as f64 + 1.0);
                let got = rule.integrate(|x| x.powi(deg as i32));
                assert!((got - exact).abs() <= 1e-12 * exact.abs().max(1.0), "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn invariants_hold() {
        for n in [1usize, 2, 5, 64, 200] {
            let rule = gauss_legendre(n, -3.0, 5.0).unwrap();
            assert_eq!(rule.order(), n);
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 8.0).abs() <= 1e-12 * 8.0);
            for i in 0..n {
                assert!((rule.nodes[i] + rule.nodes[n - 1 - i] - 2.0).abs() < 1e-12);
                assert!((rule.weights[i] - rule.weights[n - 1 - i]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(matches!(gauss_legendre(4, 1.0, 1.0), Err(Error::Interval { .. })));
        assert!(gauss_legendre(0, 0.0, 1.0).is_err());
    }

    #[test]
    fn composite_rule_sums_to_length() {
        let rule = QuadratureRule::composite(8, 0.0, 3.0, 5).unwrap();
        assert_eq!(rule.order(), 40);
        assert!((rule.integrate(|x| x.cos()) - 3.0f64.sin()).abs() < 1e-14);
    }
}
