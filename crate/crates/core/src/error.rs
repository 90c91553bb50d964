use thiserror::Error;

/// Failure modes shared across the crate.
///
/// Numeric failures carry plain `f64` diagnostics regardless of the working
/// scalar, so one error type serves every instantiation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("outside the domain of this routine: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance: estimate {estimate}, error {error} > {tolerance}")]
    NonConvergence {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },

    #[error("lanczos did not converge after {iterations} steps (residual {residual})")]
    EigenNonConvergence { iterations: usize, residual: f64 },

    #[error("exact diagonalisation is limited to {max} sites, got {sites}")]
    ResourceLimit { sites: usize, max: usize },

    #[error("assembled matrix is not a state: smallest eigenvalue {min_eigenvalue}")]
    NotAState { min_eigenvalue: f64 },

    #[error("no phase criterion fired (Mx={mx}, S={s}, C={chiral}, gap={gap})")]
    Unclassified { mx: f64, s: f64, chiral: f64, gap: f64 },

    #[error("averaging window [{start}, {end}] contains fewer than two samples")]
    EmptyWindow { start: f64, end: f64 },
}

impl Error {
    /// True for failures that stem from numerics rather than from the input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::EigenNonConvergence { .. } | Error::NotAState { .. }
        )
    }
}
