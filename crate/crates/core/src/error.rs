use thiserror::Error;

/// Errors raised by the copying toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoccError {
    #[error("dimension {requested} exceeds the configured maximum {max}")]
    Sizing { requested: usize, max: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("ambiguous eigenphase clustering: gap {gap:.3e} rad lies between phase_tol {tol:.1e} and 2*phase_tol")]
    AmbiguousClustering { gap: f64, tol: f64 },

    #[error("pair is not locally copyable: {0}")]
    NotCopyable(String),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("synthesized protocol failed verification (fidelity {fidelity:.15})")]
    VerificationFailed { fidelity: f64 },
}

pub type Result<T> = std::result::Result<T, LoccError>;
