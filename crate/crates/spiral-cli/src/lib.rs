//! Batch front-end for the spiral-spline library: ingest waypoint data,
//! run the branch pipeline, emit coefficient/curve/plot files and a
//! ranking.

pub mod input;
pub mod output;
pub mod report;
pub mod request;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(spiral_spline::Error),

    #[error("request error: {0}")]
    Request(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("every branch failed; first error: {0}")]
    AllBranchesFailed(String),
}

impl CliError {
    /// Process exit code: 2 validation, 3 parse, 1 other.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 3,
            CliError::Validation(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
