//! Special functions and quadrature shared by the numerical modules.
//!
//! Everything here is pure and allocation-light; callers may evaluate from
//! any number of threads.

mod airy;
mod ddouble;
mod quadrature;

pub use airy::{airy_ai, airy_ai_and_prime, airy_ai_prime, SERIES_SWITCH};
pub use quadrature::{gauss_legendre, QuadratureRule};
