use thiserror::Error;

/// Errors surfaced by solver configuration and numerical factorizations.
#[derive(Debug, Error)]
pub enum Error {
    /// A mesh/basis level outside the representable range was requested.
    #[error("level {requested} not supported: {reason}")]
    Level { requested: usize, reason: String },

    /// Invalid compression or solver parameter.
    #[error("invalid parameter {name} = {value}: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: String,
    },

    /// A factorization broke down (zero or near-zero pivot).
    #[error("factorization breakdown at index {index}: pivot {pivot:.3e} below guard {guard:.3e}")]
    PivotBreakdown { index: usize, pivot: f64, guard: f64 },

    /// An iterative solver failed to reach its tolerance.
    #[error("{solver} did not converge in {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// Dimension mismatch between operator and vector.
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// I/O failure while writing results.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
