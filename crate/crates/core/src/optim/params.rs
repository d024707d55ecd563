//! Step-size, epoch-length and batch-size settings, and the epoch plan they induce.

use std::fmt;

use super::OptimError;
use crate::oracle::ProblemSpec;

/// Inputs of the LogT solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams {
    /// Step size `η`.
    pub eta: f64,
    /// Updates per epoch `M`.
    pub updates_per_epoch: u64,
    /// First-epoch batch size `B¹`.
    pub initial_batch: u64,
    /// Oracle-call budget `T`.
    pub budget: u64,
}

impl HyperParams {
    pub fn new(eta: f64, updates_per_epoch: u64, initial_batch: u64, budget: u64) -> Result<Self, OptimError> {
        let p = HyperParams { eta, updates_per_epoch, initial_batch, budget };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), OptimError> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(OptimError::Config(format!("step size must be positive and finite, got {}", self.eta)));
        }
        if self.updates_per_epoch == 0 || self.initial_batch == 0 {
            return Err(OptimError::Config("updates per epoch and initial batch must be positive".into()));
        }
        let first = first_epoch_calls(self.updates_per_epoch, self.initial_batch);
        if first.is_none_or(|c| c > self.budget) {
            return Err(OptimError::BudgetTooSmall {
                budget: self.budget,
                first_epoch_calls: first.unwrap_or(u64::MAX),
            });
        }
        Ok(())
    }
}

impl fmt::Display for HyperParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "eta={} M={} B1={} T={}", self.eta, self.updates_per_epoch, self.initial_batch, self.budget)
    }
}

fn first_epoch_calls(m: u64, b1: u64) -> Option<u64> {
    m.checked_mul(b1)?.checked_mul(2)
}

/// One epoch of the plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduledEpoch {
    /// 1-based epoch index `k`.
    pub epoch: u32,
    /// `B^k = B¹·2^(k−1)`.
    pub batch_size: u64,
    /// `2M·Σ_{i≤k} B^i`.
    pub cumulative_calls: u64,
}

/// Every epoch satisfying `2M·Σ_{i≤k} B^i ≤ T`, in order.
pub fn epoch_schedule(updates_per_epoch: u64, initial_batch: u64, budget: u64) -> Vec<ScheduledEpoch> {
    let mut plan = Vec::new();
    if updates_per_epoch == 0 || initial_batch == 0 {
        return plan;
    }
    let mut batch = initial_batch;
    let mut cumulative: u64 = 0;
    for epoch in 1.. {
        let Some(next) = first_epoch_calls(updates_per_epoch, batch).and_then(|c| cumulative.checked_add(c)) else {
            break;
        };
        if next > budget {
            break;
        }
        cumulative = next;
        plan.push(ScheduledEpoch { epoch, batch_size: batch, cumulative_calls: cumulative });
        match batch.checked_mul(2) {
            Some(b) => batch = b,
            None => break,
        }
    }
    plan
}

/// Number of epochs when `M` and `B¹` are kept as real numbers.
pub fn epoch_count_real(updates_per_epoch: f64, initial_batch: f64, budget: f64) -> u32 {
    let per_first = 2.0 * updates_per_epoch * initial_batch;
    let mut k = 0;
    let mut cumulative = 0.0;
    let mut batch_factor = 1.0;
    loop {
        let next = cumulative + per_first * batch_factor;
        if next > budget {
            return k;
        }
        cumulative = next;
        batch_factor *= 2.0;
        k += 1;
    }
}

/// `η = 1/(√6 L)`, `M = ⌈4/(ηλ)⌉`, `B¹ = ⌈12ηλ⌉`.
pub fn theorem1_params(spec: &ProblemSpec, budget: u64) -> Result<HyperParams, OptimError> {
    let eta = 1.0 / (6f64.sqrt() * spec.smoothness);
    let eta_lambda = eta * spec.lambda;
    let m = (4.0 / eta_lambda).ceil() as u64;
    let b1 = (12.0 * eta_lambda).ceil() as u64;
    HyperParams::new(eta, m, b1, budget)
}

/// Confidence-dependent constants for the high-probability parameter setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighProbParams {
    pub delta: f64,
    pub alpha: f64,
    /// Final epoch index `k† = ⌊log₂(T/(8α) + 1)⌋`.
    pub k_dagger: u32,
    /// `N = ⌈log₂(4MT/(ηλ))⌉`.
    pub n_log: u32,
    /// `δ / k†` (with `k†` floored at 1); `δ / (k† + 1)` when settled from a two-cycle.
    pub delta_tilde: f64,
    /// The iteration alternated between `k†` and `k† + 1` and was settled on the
    /// conservative side: `α` computed for `k† + 1` epochs, which only shrinks `δ̃`.
    pub settled_from_cycle: bool,
    /// Rounds of the fixed-point iteration.
    pub iterations: u32,
}

const ALPHA_MAX_ITERATIONS: u32 = 100;

fn alpha_for(delta_tilde: f64, m: f64, n_log: f64) -> f64 {
    let a = (8.0 * m / delta_tilde).ln().powi(2);
    let b = (4.0 * n_log / delta_tilde).ln();
    (400.0 * a).max(1.0 + 64.0 * a * (b + 4.0 / 9.0 * b * b))
}

fn k_dagger_for(budget: f64, alpha: f64) -> u32 {
    (budget / (8.0 * alpha) + 1.0).log2().floor() as u32
}

/// Resolves the mutual dependence of `α` and `k†` by fixed-point iteration,
/// starting from `k† = ⌊log₂(T/8 + 1)⌋`.
///
/// The map `k† ↦ ⌊log₂(T/(8α(δ/k†)) + 1)⌋` is non-increasing, so the iteration
/// either settles or alternates between two adjacent values. An alternation is
/// settled with `δ̃ = δ/(larger k†)` and `k†` recomputed from the resulting `α`.
pub fn theorem2_alpha(
    delta: f64,
    budget: u64,
    updates_per_epoch: u64,
    eta: f64,
    lambda: f64,
) -> Result<HighProbParams, OptimError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(OptimError::Config(format!("confidence delta must lie in (0, 1), got {delta}")));
    }
    if !(eta > 0.0 && lambda > 0.0) || updates_per_epoch == 0 || budget == 0 {
        return Err(OptimError::Config("eta, lambda, M and T must be positive".into()));
    }
    let t = budget as f64;
    let m = updates_per_epoch as f64;
    let n_log = (4.0 * m * t / (eta * lambda)).log2().ceil();

    let mut k = k_dagger_for(t, 1.0);
    let mut previous: Option<u32> = None;
    for iteration in 1..=ALPHA_MAX_ITERATIONS {
        let delta_tilde = delta / f64::from(k.max(1));
        let alpha = alpha_for(delta_tilde, m, n_log);
        let next = k_dagger_for(t, alpha);
        if next == k {
            return Ok(HighProbParams {
                delta,
                alpha,
                k_dagger: k,
                n_log: n_log as u32,
                delta_tilde,
                settled_from_cycle: false,
                iterations: iteration,
            });
        }
        if previous == Some(next) {
            let upper = k.max(next);
            let delta_tilde = delta / f64::from(upper.max(1));
            let alpha = alpha_for(delta_tilde, m, n_log);
            return Ok(HighProbParams {
                delta,
                alpha,
                k_dagger: k_dagger_for(t, alpha),
                n_log: n_log as u32,
                delta_tilde,
                settled_from_cycle: true,
                iterations: iteration,
            });
        }
        previous = Some(k);
        k = next;
    }
    let prev = previous.unwrap_or(k);
    Err(OptimError::NoFixedPoint { lower: k.min(prev), upper: k.max(prev) })
}

/// High-probability setting: `η` and `M` as in [`theorem1_params`], with `B¹ = ⌈αηλ⌉`.
pub fn theorem2_params(
    spec: &ProblemSpec,
    budget: u64,
    delta: f64,
) -> Result<(HyperParams, HighProbParams), OptimError> {
    let eta = 1.0 / (6f64.sqrt() * spec.smoothness);
    let eta_lambda = eta * spec.lambda;
    let m = (4.0 / eta_lambda).ceil() as u64;
    let hp = theorem2_alpha(delta, budget, m, eta, spec.lambda)?;
    let b1 = (hp.alpha * eta_lambda).ceil() as u64;
    Ok((HyperParams::new(eta, m, b1, budget)?, hp))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(l: f64, lambda: f64) -> ProblemSpec {
        ProblemSpec::new(lambda, l).unwrap()
    }

    #[test]
    fn schedule_examples() {
        let plan = epoch_schedule(8, 6, 960);
        let got: Vec<_> = plan.iter().map(|e| (e.epoch, e.batch_size, e.cumulative_calls)).collect();
        assert_eq!(got, vec![(1, 6, 96), (2, 12, 288), (3, 24, 672)]);
        let got: Vec<_> =
            epoch_schedule(8, 6, 96).iter().map(|e| (e.epoch, e.batch_size, e.cumulative_calls)).collect();
        assert_eq!(got, vec![(1, 6, 96)]);
        assert!(epoch_schedule(8, 6, 95).is_empty());
    }

    #[test]
    fn schedule_survives_huge_budget() {
        let plan = epoch_schedule(1, 1, u64::MAX);
        assert!(plan.len() >= 60);
        assert!(plan.windows(2).all(|w| w[1].cumulative_calls > w[0].cumulative_calls));
    }

    #[test]
    fn unrounded_constants_match_closed_form() {
        let eta = 1.0 / 6f64.sqrt();
        let (m, b1) = (4.0 / eta, 12.0 * eta);
        for t in [96.0, 960.0, 9600.0] {
            let closed = (t / 96.0 + 1.0_f64).log2().floor() as u32;
            assert_eq!(epoch_count_real(m, b1, t), closed, "T = {t}");
        }
    }

    #[test]
    fn theorem1_examples() {
        let p = theorem1_params(&spec(1.0, 1.0), 1000).unwrap();
        assert!((p.eta - 0.408_248_290_463_863).abs() < 1e-12);
        assert_eq!((p.updates_per_epoch, p.initial_batch), (10, 5));

        for scale in [1e-3, 1.0, 250.0] {
            let p = theorem1_params(&spec(scale, scale), 10_000).unwrap();
            assert_eq!(p.updates_per_epoch, 10);
        }

        let p = theorem1_params(&spec(100.0, 1.0), 100_000).unwrap();
        assert!((p.eta - 0.004_082_482_904_638_63).abs() < 1e-15);
        assert_eq!((p.updates_per_epoch, p.initial_batch), (980, 1));
    }

    #[test]
    fn theorem1_rejects_small_budget() {
        assert!(matches!(
            theorem1_params(&spec(1.0, 1.0), 99),
            Err(OptimError::BudgetTooSmall { budget: 99, first_epoch_calls: 100 })
        ));
    }

    #[test]
    fn hyper_params_validation() {
        assert!(HyperParams::new(0.0, 1, 1, 10).is_err());
        assert!(HyperParams::new(0.1, 0, 1, 10).is_err());
        assert!(HyperParams::new(0.1, 2, 3, 11).is_err());
        assert!(HyperParams::new(0.1, 2, 3, 12).is_ok());
        assert!(HyperParams::new(0.1, u64::MAX, 3, u64::MAX).is_err());
    }

    #[test]
    fn alpha_is_monotone_in_delta() {
        let a = theorem2_alpha(0.01, 1_000_000_000, 10, 0.408, 1.0).unwrap();
        let b = theorem2_alpha(0.1, 1_000_000_000, 10, 0.408, 1.0).unwrap();
        assert!(a.alpha > b.alpha);
        let near_one = theorem2_alpha(0.999_999, u64::MAX / 4, 10, 0.408, 1.0).unwrap();
        assert!(near_one.alpha >= 400.0 * (8.0f64 * 10.0).ln().powi(2));
    }

    #[test]
    fn alpha_fixed_point_is_self_consistent() {
        for (delta, t, m) in [(0.05, 1_000_000u64, 10u64), (0.2, 50_000_000, 40), (0.001, 10_000, 3)] {
            let hp = theorem2_alpha(delta, t, m, 0.3, 0.7).unwrap();
            assert_eq!(hp.k_dagger, k_dagger_for(t as f64, hp.alpha));
            assert!(hp.alpha >= 400.0 * (8.0 * m as f64 / hp.delta_tilde).ln().powi(2));
        }
    }

    #[test]
    fn alpha_rejects_bad_delta() {
        assert!(theorem2_alpha(0.0, 100, 1, 0.1, 1.0).is_err());
        assert!(theorem2_alpha(1.0, 100, 1, 0.1, 1.0).is_err());
    }

    #[test]
    fn theorem2_params_surface_budget_error() {
        // B¹ = αηλ is in the tens of thousands; a small budget cannot hold one epoch.
        assert!(matches!(theorem2_params(&spec(1.0, 1.0), 10_000, 0.05), Err(OptimError::BudgetTooSmall { .. })));
    }
}
