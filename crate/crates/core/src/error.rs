use thiserror::Error;

/// Errors raised by the kernel. Contract violations (bad dimensions, bad
/// degrees, out-of-domain points) are reported rather than panicking.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GcxError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0} (expected 2..=4)")]
    UnsupportedDimension(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("zero spinor: {0}")]
    ZeroSpinor(String),

    #[error("spinor is not pure: annihilator has dimension {kernel_dim}, expected {expected}")]
    NotPure { kernel_dim: usize, expected: usize },

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("point outside domain: {0}")]
    OutOfDomain(String),

    #[error("missing jet data: {0}")]
    MissingJet(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal assertion failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, GcxError>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(GcxError::DimensionMismatch { expected, got })
    }
}
