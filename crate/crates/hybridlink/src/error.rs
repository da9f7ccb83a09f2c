//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument violated a mathematical or physical precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature exhausted its subdivision budget. The best
    /// estimate and its error bound are carried for diagnostics.
    #[error(
        "quadrature did not converge within {subdivisions} subdivisions \
         (best estimate {estimate:e}, error estimate {error_estimate:e})"
    )]
    QuadratureNonConvergence {
        estimate: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    /// The supplied root bracket does not straddle a sign change.
    #[error("invalid bracket [{lo}, {hi}]: f has the same sign at both ends")]
    InvalidBracket { lo: f64, hi: f64 },

    /// Root finding hit its iteration cap before reaching the tolerance.
    #[error("root finder exceeded {max_iter} iterations (best estimate {best})")]
    RootMaxIter { best: f64, max_iter: usize },

    /// A requested target cannot be met anywhere in the allowed range.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The integrand or objective returned a non-finite value.
    #[error("non-finite function value at x = {x}")]
    NonFinite { x: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
