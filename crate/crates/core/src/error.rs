use alloc::string::String;

/// Errors raised by the numerical and simulation routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The AMS loop hit its iteration cap without crossing the threshold.
    #[error("no termination after {iterations} iterations (last level {level})")]
    Nontermination { iterations: u64, level: f64 },
    /// Two successive levels coincided in floating point.
    #[error("level did not increase at iteration {iteration}: {level}")]
    DegenerateLevel { iteration: u64, level: f64 },
    /// Durand-Kerner iteration failed to converge.
    #[error("root finder did not converge after {iterations} iterations (max correction {correction:e})")]
    RootFinding { iterations: usize, correction: f64 },
    /// A linear system was numerically singular.
    #[error("singular linear system (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },
    /// Adaptive quadrature could not meet its tolerance.
    #[error("quadrature did not converge on [{lo}, {hi}] (error estimate {estimate:e})")]
    Quadrature { lo: f64, hi: f64, estimate: f64 },
    /// Any other numerical failure.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => {
        $crate::Error::Domain(alloc::format!($($arg)*))
    };
}
pub(crate) use domain;
