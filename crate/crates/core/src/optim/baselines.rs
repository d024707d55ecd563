//! Projected SGD baselines: epoch gradient descent and `1/(λt)` SGD.
//! Both project after every oracle call.

use std::time::Instant;

use super::{Checkpoint, Monitor, OptimError, RunTrace};
use crate::domain::Domain;
use crate::linalg::SymMatrix;
use crate::oracle::{GradientOracle, OracleRng, ProblemSpec, StochasticGradient};

/// Epoch gradient descent settings: epoch `k` runs `first_epoch_len·2^(k−1)` steps
/// with step size `first_step/2^(k−1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochGdConfig {
    pub first_epoch_len: u64,
    /// Defaults to `1/λ`.
    pub first_step: Option<f64>,
}

impl Default for EpochGdConfig {
    fn default() -> Self {
        EpochGdConfig { first_epoch_len: 16, first_step: None }
    }
}

/// Lengths of the epochs that fit in `budget` steps.
pub fn epoch_gd_lengths(first_epoch_len: u64, budget: u64) -> Vec<u64> {
    let mut lengths = Vec::new();
    let mut len = first_epoch_len;
    let mut used: u64 = 0;
    while len > 0 {
        match used.checked_add(len) {
            Some(next) if next <= budget => {
                used = next;
                lengths.push(len);
            }
            _ => break,
        }
        len = match len.checked_mul(2) {
            Some(l) => l,
            None => break,
        };
    }
    lengths
}

/// Each step is `w ← Π(w − η_k ĝ(w))`; an epoch hands the mean of its post-step
/// iterates to the next. Returns that mean for the last completed epoch, or the
/// (projected) start if no epoch fits.
#[allow(clippy::too_many_arguments)]
pub fn epoch_gd_solve<S: StochasticGradient>(
    oracle: &mut GradientOracle<S>,
    domain: &mut Domain,
    spec: &ProblemSpec,
    budget: u64,
    w0: &SymMatrix,
    config: &EpochGdConfig,
    rng: &mut OracleRng,
    monitor: &Monitor<'_>,
) -> Result<RunTrace, OptimError> {
    super::check_dims(oracle.dim(), domain, w0)?;
    if config.first_epoch_len == 0 {
        return Err(OptimError::Config("first epoch length must be positive".into()));
    }
    let first_step = config.first_step.unwrap_or(1.0 / spec.lambda);
    if !(first_step > 0.0 && first_step.is_finite()) {
        return Err(OptimError::Config(format!("first step size must be positive, got {first_step}")));
    }
    let start = Instant::now();
    let calls_before = oracle.call_count();
    let projections_before = domain.projection_count();
    let counts =
        |o: &GradientOracle<S>, d: &Domain| (o.call_count() - calls_before, d.projection_count() - projections_before);

    let mut anchor = super::feasible_start(domain, w0)?;
    let mut checkpoints = Vec::new();
    let (c, p) = counts(oracle, domain);
    checkpoints.extend(monitor.checkpoint(&anchor, c, p));

    let mut step = first_step;
    for len in epoch_gd_lengths(config.first_epoch_len, budget) {
        let mut w = anchor.clone();
        let mut sum = SymMatrix::zeros(w.dim());
        for _ in 0..len {
            let g = oracle.sample(&w, rng);
            w = domain.project(&w.plus_scaled(-step, &g))?;
            sum.add_scaled(1.0, &w);
        }
        sum.scale_mut(1.0 / len as f64);
        anchor = sum;
        step *= 0.5;
        let (c, p) = counts(oracle, domain);
        checkpoints.extend(monitor.checkpoint(&anchor, c, p));
    }

    let (total_oracle_calls, total_projections) = counts(oracle, domain);
    Ok(RunTrace {
        epochs: Vec::new(),
        checkpoints,
        final_iterate: anchor,
        total_oracle_calls,
        total_projections,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Steps at which the SGD baseline records its objective: about ten per decade, plus `T`.
pub fn log_spaced_steps(budget: u64) -> Vec<u64> {
    let mut steps = Vec::new();
    let mut i = 0;
    loop {
        let s = 10f64.powf(f64::from(i) / 10.0).round() as u64;
        if s >= budget {
            break;
        }
        if steps.last() != Some(&s) {
            steps.push(s);
        }
        i += 1;
    }
    if budget > 0 {
        steps.push(budget);
    }
    steps
}

/// `w ← Π(w − ĝ(w)/(λt))` for `t = 1..T`; returns the last iterate.
pub fn sgd_solve<S: StochasticGradient>(
    oracle: &mut GradientOracle<S>,
    domain: &mut Domain,
    lambda: f64,
    budget: u64,
    w0: &SymMatrix,
    rng: &mut OracleRng,
    monitor: &Monitor<'_>,
) -> Result<RunTrace, OptimError> {
    super::check_dims(oracle.dim(), domain, w0)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(OptimError::Config(format!("lambda must be positive, got {lambda}")));
    }
    let start = Instant::now();
    let calls_before = oracle.call_count();
    let projections_before = domain.projection_count();

    let mut w = super::feasible_start(domain, w0)?;
    let mut checkpoints: Vec<Checkpoint> = Vec::new();
    checkpoints.extend(monitor.checkpoint(&w, 0, domain.projection_count() - projections_before));

    let marks = log_spaced_steps(budget);
    let mut next_mark = marks.iter().copied().peekable();
    for t in 1..=budget {
        let g = oracle.sample(&w, rng);
        w = domain.project(&w.plus_scaled(-1.0 / (lambda * t as f64), &g))?;
        if next_mark.peek() == Some(&t) {
            next_mark.next();
            if monitor.objective.is_some() {
                let c = oracle.call_count() - calls_before;
                let p = domain.projection_count() - projections_before;
                checkpoints.extend(monitor.checkpoint(&w, c, p));
            }
        }
    }

    Ok(RunTrace {
        epochs: Vec::new(),
        checkpoints,
        final_iterate: w,
        total_oracle_calls: oracle.call_count() - calls_before,
        total_projections: domain.projection_count() - projections_before,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}
