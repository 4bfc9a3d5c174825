//! Error types shared by all solver modules.

use thiserror::Error;

/// Errors produced by the spectral solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The spectral parameter x(E) is too close to a pole of the G-function
    /// for the series to be evaluated reliably.
    #[error("x = {x} lies within the guard distance {guard:e} of the pole at x = {pole}")]
    PoleProximity { x: f64, pole: i64, guard: f64 },

    /// The G-function series never met its tail criterion.
    #[error(
        "G series tail criterion not met within {max_terms} terms \
         (log10 of last term = {last_term_log10:.2})"
    )]
    SeriesNonConvergence {
        max_terms: usize,
        last_term_log10: f64,
    },

    /// An eigensolver failed to produce eigenpairs within its residual bound.
    #[error(
        "eigensolver did not converge: {detail} ({iterations} iterations, residual {residual:e})"
    )]
    SolverNonConvergence {
        detail: String,
        iterations: usize,
        residual: f64,
    },

    /// The finite-difference box is too small for the requested level count.
    #[error(
        "integration box too tight: level {level} at {level_value} exceeds \
         the boundary potential {boundary_value}"
    )]
    BoundaryTooTight {
        level: usize,
        level_value: f64,
        boundary_value: f64,
    },

    /// A requested allocation exceeds the configured resource limits.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;
