//! Numerical laboratory for p-Laplace eigenfunctions and Hardy-type
//! singular solutions.
//!
//! * [`indicial`]: best Hardy constants and roots of the indicial function.
//! * [`radial`]: 1-D and radial ODE reductions, separatrix shooting, decay fits.
//! * [`blowup`]: origin dilations, translations to infinity, Busemann and Martin limits.
//! * [`grid`]: 2-D finite-difference solver and gradient-bound diagnostics.
//!
//! Data-parallel loops go through [`exec`], which falls back to sequential
//! execution when the `parallel` feature is disabled.

pub mod blowup;
pub mod exec;
pub mod grid;
pub mod indicial;
pub mod interp;
pub mod ode;
pub mod radial;
pub mod report;

pub use exec::Exec;
pub use indicial::{
    auxiliary_f, critical_exponent, eigen_rate_alpha, hardy_best_constant, indicial_roots,
    IndicialData, IndicialError, Placement, ProblemParams,
};
