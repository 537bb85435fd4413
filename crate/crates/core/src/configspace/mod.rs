//! Configuration-space machinery: finite configurations, local functions and
//! their square field, Monte-Carlo Dirichlet energies, correlation functions,
//! the Möbius expansion of a local function, the cut-off function, and the
//! Bernstein–mollifier polynomial approximation.
//!
//! Together these let the polynomial-core approximation of a local smooth
//! function be carried out numerically, see [`core_approximation_report`].

mod bernstein;
mod configuration;
mod correlation;
mod cutoff;
mod energy;
mod local;
mod mobius;
mod polynomial;
mod report;
mod sampler;

pub use bernstein::{
    bernstein_basis, bernstein_mollifier_approx, bernstein_symmetric_approx, mollifier, mollifier_derivative, smoothed_basis,
    BernsteinApprox,
};
pub use configuration::{Configuration, Window};
pub use correlation::{correlation_estimate, Bins, CorrelationEstimate};
pub use cutoff::{cutoff, cutoff_distance, tent, BoundSequence};
pub use energy::{dirichlet_energy_mc, dirichlet_energy_on, h1_norm_estimate, h1_norm_on, H1Estimate};
pub use local::{evaluate_local, gradient, square_field, FamilyFn, GradientFn, LocalFunction, TestFunction, DEFAULT_GRAD_STEP};
pub use mobius::{
    mobius_reconstruct, mobius_transform, mobius_transform_unchecked, truncate, truncate_by_enumeration, truncate_with_bound,
    truncated_function, MobiusFamily,
};
pub use polynomial::{poly_eval, poly_gradient, Outer, Polynomial, PolynomialFunctional};
pub use report::{core_approximation_on, core_approximation_report, CoreApproxRow};
pub use sampler::{draw_samples, ConfigurationSampler, PoissonSampler, SnapshotSampler};
