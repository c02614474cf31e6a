use std::path::PathBuf;

use pframe::FrameError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("invariant failed: {0}")]
    Invariant(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invariant(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io { .. } | CliError::Csv(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

/// Numerical failures name an invariant; malformed inputs are config errors.
impl From<FrameError> for CliError {
    fn from(e: FrameError) -> Self {
        match e {
            FrameError::InvariantViolated { .. }
            | FrameError::NotParseval { .. }
            | FrameError::NotProjector { .. }
            | FrameError::NotInvertible
            | FrameError::MixedBranch { .. }
            | FrameError::NotPositive { .. }
            | FrameError::IncompleteFamily { .. }
            | FrameError::NotRieszSubfamily(_)
            | FrameError::DegenerateWeights(_)
            | FrameError::DegenerateWeight(_) => CliError::Invariant(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
