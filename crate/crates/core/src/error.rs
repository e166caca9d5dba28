use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Shapes do not fit the operation (non-square, mismatched sizes, bad lengths).
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An input is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A count or index is outside its supported range.
    #[error("out of bounds: {0}")]
    Bounds(String),

    /// The point does not belong to the requested chart neighbourhood.
    #[error("point outside chart: {0}")]
    OutOfChart(String),

    /// The closed-form chart transition hit a singular matrix.
    #[error("transition undefined: {0}")]
    TransitionDomain(String),

    /// A numerical consistency check failed.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A group element could not be reconstructed from its image.
    #[error("reconstruction failed, residual {0:e}")]
    Reconstruction(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
