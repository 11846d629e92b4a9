//! Two-dimensional finite differences for `-Δ_p v = -λ v^{p-1}`: fields,
//! residual and linearized operators, a damped Newton solver, and the
//! gradient-bound diagnostics.

mod diagnostics;
mod field;
mod operators;
mod representation;
mod solve;

use thiserror::Error;

pub use diagnostics::{
    bochner_residual, bochner_residual_field, directional_range, gradient_log_sup, kappa, kappa_bound_check,
    KappaCheck,
};
pub use field::{Field2D, MaskedField, Rect};
pub use operators::{ellipticity_check, linearized_apply, p_laplace_residual, p_laplace_residual_with};
pub use representation::{representation_field, representation_quadrature, Quadrature};
pub use solve::{
    solve_dirichlet, solve_dirichlet_exponential, solve_dirichlet_with, InitialGuess, SolveOptions, SolveStats,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("field must be strictly positive")]
    NotPositive,
    #[error("Newton did not converge after {iters} iterations (residual {residual:e}): {reason}")]
    NoConvergence { iters: usize, residual: f64, reason: String },
}
