use alloc::string::String;

/// Errors reported by state construction, measures, and the spin solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{n_qubits} qubits exceeds the configured cap of {cap}")]
    DimensionOverflow { n_qubits: usize, cap: usize },
    #[error("amplitude vector of length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("expected {expected} amplitudes, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("invalid qubit positions: {0}")]
    InvalidPositions(String),
    #[error("angle out of range: {0}")]
    AngleOutOfRange(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("empty cut list")]
    EmptyCuts,
    #[error("Lanczos did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("series is flat; no extremum to locate")]
    FlatSeries,
}

pub type Result<T> = core::result::Result<T, Error>;
