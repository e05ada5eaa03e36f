use thiserror::Error;

/// Errors for model construction, sampling, quadrature, and I/O.
#[derive(Debug, Error)]
pub enum FouError {
    /// A scalar parameter is outside its admissible range.
    #[error("invalid parameter {name} = {value}: requires {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// An operation was called outside its mathematical domain
    /// (e.g. kernel analytics need 1/2 < H < 1).
    #[error("domain error: {0}")]
    Domain(String),

    /// Inputs are structurally unusable (empty grid, mismatched lengths,
    /// wrong process kind, time not on the grid).
    #[error("usage error: {0}")]
    Usage(String),

    /// A numerical procedure failed beyond its recovery policy
    /// (Cholesky after jitter escalation, overflowing time change, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Adaptive quadrature stopped at its subdivision budget with the
    /// error estimate still above the requested tolerance.
    #[error(
        "quadrature did not converge: estimate {estimate:.6e}, \
         error bound {error:.3e}, requested {requested:.3e}"
    )]
    QuadratureNoConvergence {
        estimate: f64,
        error: f64,
        requested: f64,
    },

    /// Config file or CLI flag material is malformed.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FouError>;

impl FouError {
    /// Process exit code for the CLI: 2 for usage/domain/config problems,
    /// 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            FouError::InvalidParameter { .. }
            | FouError::Domain(_)
            | FouError::Usage(_)
            | FouError::Config(_) => 2,
            _ => 1,
        }
    }
}
