use std::cmp::Ordering;

use crate::error::{Error, Result};

/// A finite configuration `ξ = Σ δ_{x_i}` of points in `R^d`.
///
/// Points are stored flat in canonical order: increasing Euclidean norm, ties
/// broken lexicographically. Index `j` in this order is the `x_j(ξ)` labelling
/// used by the cut-off function.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    dim: usize,
    coords: Vec<f64>,
}

fn norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn canonical_cmp(a: &[f64], b: &[f64]) -> Ordering {
    norm(a).total_cmp(&norm(b)).then_with(|| {
        a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
    })
}

impl Configuration {
    pub fn empty(dim: usize) -> Self {
        Self { dim, coords: Vec::new() }
    }

    /// Builds from a flat coordinate buffer of `len / dim` points.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("configuration has non-finite coordinates".into()));
        }
        let mut points: Vec<&[f64]> = coords.chunks(dim).collect();
        points.sort_by(|a, b| canonical_cmp(a, b));
        Ok(Self { dim, coords: points.concat() })
    }

    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidArgument(format!("all points must have dimension {dim}")));
        }
        Self::from_flat(dim, points.concat())
    }

    /// One-dimensional configuration.
    pub fn on_line(xs: &[f64]) -> Result<Self> {
        Self::from_flat(1, xs.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm_of(&self, i: usize) -> f64 {
        norm(self.point(i))
    }

    /// Adds one point, keeping canonical order.
    pub fn with_point(&self, p: &[f64]) -> Result<Self> {
        let mut coords = self.coords.clone();
        coords.extend_from_slice(p);
        Self::from_flat(self.dim, coords)
    }

    /// `ξ_{S_r}`: points with `|x| < r`.
    pub fn restrict(&self, r: f64) -> Self {
        self.filter(|p| norm(p) < r)
    }

    /// `ξ_K` for the window cube.
    pub fn restrict_to_window(&self, window: &Window) -> Self {
        self.filter(|p| window.contains(p))
    }

    /// `ξ(S_r)`.
    pub fn count_within(&self, r: f64) -> usize {
        self.points().filter(|p| norm(p) < r).count()
    }

    fn filter<F: Fn(&[f64]) -> bool>(&self, keep: F) -> Self {
        let coords = self.points().filter(|p| keep(p)).flatten().copied().collect();
        Self { dim: self.dim, coords }
    }

    /// Whether two points coincide.
    pub fn has_duplicates(&self) -> bool {
        let n = self.len();
        (0..n).any(|i| ((i + 1)..n).any(|j| self.point(i) == self.point(j)))
    }
}

/// The cube `K = [-r, r]^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub r: f64,
    pub dim: usize,
}

impl Window {
    pub fn new(r: f64, dim: usize) -> Result<Self> {
        if !(r > 0.0) || dim == 0 {
            return Err(Error::InvalidArgument(format!("window needs r > 0 and d >= 1, got r = {r}, d = {dim}")));
        }
        Ok(Self { r, dim })
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter().all(|x| x.abs() <= self.r)
    }

    /// Smallest cube containing both windows.
    pub fn union(&self, other: &Window) -> Window {
        Window { r: self.r.max(other.r), dim: self.dim }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_is_by_norm_then_lexicographic() {
        let c = Configuration::on_line(&[3.0, -0.5, 0.5, 0.0]).unwrap();
        assert_eq!(c.coords(), &[0.0, -0.5, 0.5, 3.0]);
        let c2 = Configuration::from_points(2, &[vec![1.0, 0.0], vec![0.0, -1.0], vec![0.1, 0.1]]).unwrap();
        assert_eq!(c2.point(0), &[0.1, 0.1]);
        assert_eq!(c2.point(1), &[0.0, -1.0]);
    }

    #[test]
    fn restrict_examples() {
        let c = Configuration::on_line(&[0.0, 0.5, 3.0]).unwrap();
        assert_eq!(c.restrict(1.0).coords(), &[0.0, 0.5]);
        assert_eq!(c.restrict(f64::INFINITY), c);
        assert!(Configuration::empty(1).restrict(1.0).is_empty());
    }

    #[test]
    fn window_membership_is_closed_cube() {
        let w = Window::new(1.0, 2).unwrap();
        assert!(w.contains(&[1.0, -1.0]));
        assert!(!w.contains(&[1.0001, 0.0]));
    }

    #[test]
    fn rejects_ragged_input() {
        assert!(Configuration::from_flat(2, vec![1.0, 2.0, 3.0]).is_err());
        assert!(Configuration::on_line(&[f64::NAN]).is_err());
    }
}
