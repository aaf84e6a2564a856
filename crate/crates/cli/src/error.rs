use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] convlab::Error),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("invalid family file {path}: {source}")]
    FamilyFile { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
}

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARAMETER: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_ACCURACY: i32 = 4;
/// Returned by `matrix` when the diagram check fails; not an error value.
pub const EXIT_VIOLATION: i32 = 5;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_parameter() => EXIT_PARAMETER,
            CliError::Core(e) if e.is_input() => EXIT_INPUT,
            CliError::Core(e) if e.is_accuracy() => EXIT_ACCURACY,
            CliError::Core(_) => EXIT_OTHER,
            CliError::Read { .. } | CliError::FamilyFile { .. } => EXIT_INPUT,
            CliError::Write { .. } => EXIT_OTHER,
            CliError::Usage(_) => EXIT_PARAMETER,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
