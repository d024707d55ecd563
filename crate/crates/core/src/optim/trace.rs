use crate::linalg::SymMatrix;
use crate::oracle::{Objective, ProblemSpec};

/// Optional instrumentation for a solve: objective evaluation and risk budgets.
#[derive(Clone, Copy, Default)]
pub struct Monitor<'a> {
    pub objective: Option<&'a dyn Objective>,
    pub spec: Option<&'a ProblemSpec>,
}

impl<'a> Monitor<'a> {
    pub fn none() -> Self {
        Monitor::default()
    }

    pub fn new(objective: &'a dyn Objective, spec: &'a ProblemSpec) -> Self {
        Monitor { objective: Some(objective), spec: Some(spec) }
    }

    pub fn objective(&self, w: &SymMatrix) -> Option<f64> {
        self.objective.map(|o| o.value(w))
    }

    pub fn excess(&self, objective: Option<f64>) -> Option<f64> {
        Some(objective? - self.spec?.optimum_value?)
    }

    /// `V_k = G²/(λ·2^(k−2))`.
    pub fn risk_budget(&self, epoch: u32) -> Option<f64> {
        let spec = self.spec?;
        let g = spec.gradient_bound?;
        Some(g * g / (spec.lambda * 2f64.powi(epoch as i32 - 2)))
    }

    pub(crate) fn checkpoint(&self, w: &SymMatrix, oracle_calls: u64, projections: u64) -> Option<Checkpoint> {
        let objective = self.objective(w)?;
        Some(Checkpoint { oracle_calls, projections, objective, excess_risk: self.excess(Some(objective)) })
    }
}

/// State of one LogT epoch, measured at its first iterate `w_1^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: u32,
    pub batch_size: u64,
    /// `2·M·B^k`.
    pub oracle_calls: u64,
    /// `2·M`.
    pub projections: u64,
    pub start_iterate: SymMatrix,
    /// `V_k`, when the oracle bound is known.
    pub risk_budget: Option<f64>,
    pub objective: Option<f64>,
    /// `Δ_k = F(w_1^k) − F(w*)`, when the optimum is known.
    pub measured_excess_risk: Option<f64>,
}

/// Objective snapshot after a given number of oracle calls and projections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub oracle_calls: u64,
    pub projections: u64,
    pub objective: f64,
    pub excess_risk: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    /// Per-epoch records (LogT only).
    pub epochs: Vec<EpochRecord>,
    /// Objective curve; empty unless the monitor carries an objective.
    pub checkpoints: Vec<Checkpoint>,
    pub final_iterate: SymMatrix,
    pub total_oracle_calls: u64,
    pub total_projections: u64,
    pub wall_time_seconds: f64,
}

impl RunTrace {
    pub fn final_checkpoint(&self) -> Option<&Checkpoint> {
        self.checkpoints.last()
    }
}
