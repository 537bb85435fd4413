//! Numerical laboratory for finite and infinite Dyson-type particle systems.
//!
//! The crate is split along the two routes to the limiting dynamics:
//!
//! * [`kernels`] and [`fredholm`] evaluate the sine and Airy kernels, their
//!   space-time extensions, and Fredholm determinants built from them (gap
//!   probabilities, the Tracy–Widom distribution, multi-time generating
//!   functionals).
//! * [`sde`], [`isde`] and [`configspace`] cover the stochastic side: finite-N
//!   Dyson dynamics, truncated drifts of the infinite systems, and the
//!   configuration-space machinery behind Dirichlet forms and their polynomial
//!   cores.
//!
//! [`specfun`] holds the Airy function and Gauss–Legendre quadrature shared by
//! everything else.

pub mod configspace;
pub mod error;
pub mod fredholm;
pub mod isde;
pub mod kernels;
pub mod rng;
pub mod sde;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
