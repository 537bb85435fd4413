use super::configuration::Configuration;
use crate::error::{Error, Result};

/// Non-decreasing bounds `a_1 ≤ … ≤ a_R` on the point counts `ξ(S_r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundSequence {
    values: Vec<usize>,
}

impl BoundSequence {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("bound sequence needs at least one entry".into()));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument(format!("bound sequence must be non-decreasing: {values:?}")));
        }
        Ok(Self { values })
    }

    /// `a_r = value` for `r = 1..=horizon`.
    pub fn constant(value: usize, horizon: usize) -> Result<Self> {
        Self::new(vec![value; horizon])
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    /// `a_r`, one-based.
    pub fn get(&self, r: usize) -> usize {
        self.values[r - 1]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }
}

/// `d_a(ξ) = (Σ_{r ≤ R} Σ_{j ∈ J_{r,ξ}} (r - |x_j|)²)^{1/2}` with
/// `J_{r,ξ} = {j > a_r : |x_j| < r}` in canonical order.
pub fn cutoff_distance(xi: &Configuration, a: &BoundSequence) -> f64 {
    let norms: Vec<f64> = (0..xi.len()).map(|j| xi.norm_of(j)).collect();
    let mut total = 0.0;
    for r in 1..=a.horizon() {
        let rf = r as f64;
        total += norms.iter().skip(a.get(r)).take_while(|&&x| x < rf).map(|x| (rf - x).powi(2)).sum::<f64>();
    }
    total.sqrt()
}

/// `h(t)`: 1 below 0, `1 - t` on `[0, 1]`, 0 above.
pub fn tent(t: f64) -> f64 {
    if t < 0.0 {
        1.0
    } else if t <= 1.0 {
        1.0 - t
    } else {
        0.0
    }
}

/// `𝒳[a](ξ) = h(d_a(ξ))`.
pub fn cutoff(xi: &Configuration, a: &BoundSequence) -> f64 {
    tent(cutoff_distance(xi, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tent_values() {
        assert_eq!(tent(-1.0), 1.0);
        assert_eq!(tent(0.25), 0.75);
        assert_eq!(tent(2.0), 0.0);
    }

    #[test]
    fn hand_example() {
        let a = BoundSequence::new(vec![1, 2, 3]).unwrap();
        let xi = Configuration::on_line(&[0.0, 0.5]).unwrap();
        assert!((cutoff_distance(&xi, &a) - 0.5).abs() < 1e-15);
        assert!((cutoff(&xi, &a) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn within_bounds_gives_one() {
        let a = BoundSequence::new(vec![2, 3, 5]).unwrap();
        let xi = Configuration::on_line(&[0.2, -0.9, 1.5, 2.5, 2.7]).unwrap();
        assert_eq!(cutoff_distance(&xi, &a), 0.0);
        assert_eq!(cutoff(&xi, &a), 1.0);
        let crowded = Configuration::on_line(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let c = cutoff(&crowded, &a);
        assert!((0.0..1.0).contains(&c));
    }

    #[test]
    fn rejects_decreasing() {
        assert!(BoundSequence::new(vec![3, 2]).is_err());
        assert!(BoundSequence::new(vec![]).is_err());
    }
}
