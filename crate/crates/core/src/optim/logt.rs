//! Epoch-based mini-batch extra-gradient descent with `O(log T)` projections.
//!
//! Epoch `k` runs `M` extra-gradient steps with batch size `B^k`:
//!
//! ```text
//! ḡ = mean of B^k samples at w_t
//! z_t     = Π(w_t − η ḡ)
//! f̄ = mean of B^k samples at z_t
//! w_{t+1} = Π(w_t − η f̄)        // steps from w_t, not z_t
//! ```
//!
//! The next epoch starts from the mean of the `z_t` and doubles the batch. Epochs
//! continue while `2M·Σ_{i≤k} B^i ≤ T`; unused budget is left on the table.

use std::time::Instant;

use super::{epoch_schedule, EpochRecord, HyperParams, Monitor, OptimError, RunTrace};
use crate::domain::Domain;
use crate::linalg::SymMatrix;
use crate::oracle::{GradientOracle, OracleRng, StochasticGradient};

pub fn logt_solve<S: StochasticGradient>(
    oracle: &mut GradientOracle<S>,
    domain: &mut Domain,
    params: &HyperParams,
    w0: &SymMatrix,
    rng: &mut OracleRng,
    monitor: &Monitor<'_>,
) -> Result<RunTrace, OptimError> {
    params.validate()?;
    super::check_dims(oracle.dim(), domain, w0)?;
    let start = Instant::now();
    let calls_before = oracle.call_count();
    let projections_before = domain.projection_count();

    let mut w = super::feasible_start(domain, w0)?;
    let eta = params.eta;
    let m = params.updates_per_epoch;
    let mut epochs = Vec::new();
    let mut checkpoints = Vec::new();

    for planned in epoch_schedule(m, params.initial_batch, params.budget) {
        let calls = oracle.call_count() - calls_before;
        let projections = domain.projection_count() - projections_before;
        let objective = monitor.objective(&w);
        if let Some(cp) = monitor.checkpoint(&w, calls, projections) {
            checkpoints.push(cp);
        }
        epochs.push(EpochRecord {
            epoch: planned.epoch,
            batch_size: planned.batch_size,
            oracle_calls: 2 * m * planned.batch_size,
            projections: 2 * m,
            start_iterate: w.clone(),
            risk_budget: monitor.risk_budget(planned.epoch),
            objective,
            measured_excess_risk: monitor.excess(objective),
        });

        let mut z_sum = SymMatrix::zeros(w.dim());
        for _ in 0..m {
            let g = oracle.average_gradient(&w, planned.batch_size, rng);
            let z = domain.project(&w.plus_scaled(-eta, &g))?;
            let f = oracle.average_gradient(&z, planned.batch_size, rng);
            w = domain.project(&w.plus_scaled(-eta, &f))?;
            z_sum.add_scaled(1.0, &z);
        }
        z_sum.scale_mut(1.0 / m as f64);
        w = z_sum;
        log::trace!("epoch {} done, batch {}", planned.epoch, planned.batch_size);
    }

    let total_oracle_calls = oracle.call_count() - calls_before;
    let total_projections = domain.projection_count() - projections_before;
    if let Some(cp) = monitor.checkpoint(&w, total_oracle_calls, total_projections) {
        checkpoints.push(cp);
    }
    Ok(RunTrace {
        epochs,
        checkpoints,
        final_iterate: w,
        total_oracle_calls,
        total_projections,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}
