//! Solvers: LogT (epoch mini-batch extra-gradient) and the two projected-SGD
//! baselines, plus the parameter calculators that configure them.

mod baselines;
mod logt;
mod params;
mod trace;

use thiserror::Error;

pub use baselines::{epoch_gd_lengths, epoch_gd_solve, log_spaced_steps, sgd_solve, EpochGdConfig};
pub use logt::logt_solve;
pub use params::{
    epoch_count_real, epoch_schedule, theorem1_params, theorem2_alpha, theorem2_params, HighProbParams, HyperParams,
    ScheduledEpoch,
};
pub use trace::{Checkpoint, EpochRecord, Monitor, RunTrace};

use crate::domain::Domain;
use crate::linalg::{LinalgError, SymMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("budget T = {budget} cannot hold one epoch ({first_epoch_calls} oracle calls)")]
    BudgetTooSmall { budget: u64, first_epoch_calls: u64 },
    #[error("alpha/k† iteration did not settle; k† oscillates between {lower} and {upper}")]
    NoFixedPoint { lower: u32, upper: u32 },
    #[error(transparent)]
    Numerical(#[from] LinalgError),
}

impl OptimError {
    pub fn is_numerical(&self) -> bool {
        matches!(self, OptimError::Numerical(_))
    }
}

/// Tolerance under which a starting point counts as feasible.
const START_FEASIBILITY_TOL: f64 = 1e-9;

fn check_dims(oracle_dim: usize, domain: &Domain, w0: &SymMatrix) -> Result<(), OptimError> {
    if oracle_dim != domain.dim() || w0.dim() != domain.dim() {
        return Err(OptimError::Config(format!(
            "dimension mismatch: oracle {oracle_dim}, domain {}, start {}",
            domain.dim(),
            w0.dim()
        )));
    }
    Ok(())
}

/// `w0` itself when feasible, otherwise its projection (which is counted).
fn feasible_start(domain: &mut Domain, w0: &SymMatrix) -> Result<SymMatrix, OptimError> {
    if domain.contains(w0, START_FEASIBILITY_TOL) {
        Ok(w0.clone())
    } else {
        Ok(domain.project(w0)?)
    }
}
