use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] lggm_core::Error),
}

impl CliError {
    /// 2 for bad input, 3 for registers over the cap, 4 for Lanczos
    /// failures, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        use lggm_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                E::DimensionOverflow { .. } => 3,
                E::NoConvergence { .. } => 4,
                E::NotPowerOfTwo(_)
                | E::LengthMismatch { .. }
                | E::NotNormalized(_)
                | E::ZeroNorm
                | E::InvalidPositions(_)
                | E::AngleOutOfRange(_)
                | E::InvalidParameter(_)
                | E::EmptyCuts => 2,
                E::NotHermitian(_) | E::FlatSeries => 1,
            },
        }
    }
}
