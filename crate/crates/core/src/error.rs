use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Shapes or truncations that cannot be combined.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// The requested truncation is too small for the operator or state.
    #[error("truncation risk in {what}: need n_trunc > {required:.1}, got {n_trunc}")]
    TruncationRisk {
        what: &'static str,
        required: f64,
        n_trunc: usize,
    },

    /// A parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure did not reach its tolerance.
    #[error("accuracy error in {what}: achieved {achieved:.3e}, tolerance {tolerance:.1e}")]
    Accuracy {
        what: &'static str,
        achieved: f64,
        tolerance: f64,
    },

    /// A computed quantity violates a physical validity condition.
    #[error("numerical validity error: {0}")]
    Validity(String),

    /// The normalization of a superposition vanishes.
    #[error("degenerate superposition: denominator {0:.3e}")]
    Degenerate(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
