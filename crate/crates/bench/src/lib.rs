//! Seeded, repeated experiments comparing LogT with the projected-SGD
//! baselines, written out as CSV.

pub mod config;
pub mod report;
pub mod runner;

use logt_core::data::DataError;
use logt_core::OptimError;
use thiserror::Error;

pub use config::{Algorithm, ExperimentConfig};
pub use report::{summarize, SummaryRow};
pub use runner::{CellFailure, CurveRow, Experiment, ResultRow, RunOutput};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("dataset error: {0}")]
    Data(#[from] DataError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl BenchError {
    /// Process exit code: 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) | BenchError::Data(_) => 2,
            BenchError::Numerical(_) => 3,
            BenchError::Io(_) | BenchError::Csv(_) => 1,
        }
    }
}

impl From<OptimError> for BenchError {
    fn from(e: OptimError) -> Self {
        if e.is_numerical() {
            BenchError::Numerical(e.to_string())
        } else {
            BenchError::Config(e.to_string())
        }
    }
}
