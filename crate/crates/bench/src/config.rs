//! JSON experiment configuration.

use std::fs;
use std::path::{Path, PathBuf};

use logt_core::optim::EpochGdConfig;
use logt_core::DomainKind;
use serde::{Deserialize, Serialize};

use crate::BenchError;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "LOGT_BENCH_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "results";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Logt,
    EpochGd,
    Sgd,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Logt, Algorithm::EpochGd, Algorithm::Sgd];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Logt => "logt",
            Algorithm::EpochGd => "epoch_gd",
            Algorithm::Sgd => "sgd",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    /// `F(W) = ½‖W‖²_F` over symmetric `dim × dim` matrices. With `radius`, the
    /// domain defaults to the capped cone and the oracle bound `G = radius + dim`.
    QuadraticPsd {
        #[serde(default = "default_quadratic_dim")]
        dim: usize,
        #[serde(default)]
        radius: Option<f64>,
    },
    MetricLearning {
        dataset: DatasetConfig,
        #[serde(default = "default_reg_lambda")]
        reg_lambda: f64,
        #[serde(default = "default_test_pairs")]
        test_pairs: usize,
    },
}

fn default_quadratic_dim() -> usize {
    5
}

fn default_reg_lambda() -> f64 {
    0.1
}

fn default_test_pairs() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetConfig {
    Synthetic {
        #[serde(default = "default_points")]
        n: usize,
        #[serde(default = "default_features")]
        dim: usize,
        #[serde(default = "default_separation")]
        separation: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Features are scaled to `[0, 1]` after loading.
    Libsvm {
        path: PathBuf,
        #[serde(default)]
        expected_dim: Option<usize>,
    },
}

fn default_points() -> usize {
    2000
}

fn default_features() -> usize {
    10
}

pub const DEFAULT_SEPARATION: f64 = 3.0;

fn default_separation() -> f64 {
    DEFAULT_SEPARATION
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    PsdCone,
    PsdConeCapped { radius: f64 },
    FrobBall { radius: f64 },
    Unconstrained,
}

impl DomainConfig {
    pub fn kind(self, dim: usize) -> DomainKind {
        match self {
            DomainConfig::PsdCone => DomainKind::PsdCone { dim },
            DomainConfig::PsdConeCapped { radius } => DomainKind::PsdConeCapped { dim, radius },
            DomainConfig::FrobBall { radius } => DomainKind::FrobBall { dim, radius },
            DomainConfig::Unconstrained => DomainKind::Unconstrained { dim },
        }
    }
}

/// How LogT's `η`, `M` and `B¹` are derived from the problem constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum ParamRule {
    /// Settings that bound the expected excess risk ([`theorem1_params`]).
    ///
    /// [`theorem1_params`]: logt_core::optim::theorem1_params
    #[default]
    Expected,
    /// High-probability setting with confidence `1 − delta` ([`theorem2_params`]).
    ///
    /// [`theorem2_params`]: logt_core::optim::theorem2_params
    HighProbability { delta: f64 },
}

/// Replaces individual LogT settings after the rule has been applied.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperOverrides {
    pub eta: Option<f64>,
    pub updates_per_epoch: Option<u64>,
    pub initial_batch: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpochGdSettings {
    #[serde(default = "default_first_epoch_len")]
    pub first_epoch_len: u64,
    /// Defaults to `1/λ`.
    #[serde(default)]
    pub first_step: Option<f64>,
}

fn default_first_epoch_len() -> u64 {
    EpochGdConfig::default().first_epoch_len
}

impl Default for EpochGdSettings {
    fn default() -> Self {
        EpochGdSettings { first_epoch_len: default_first_epoch_len(), first_step: None }
    }
}

impl From<EpochGdSettings> for EpochGdConfig {
    fn from(s: EpochGdSettings) -> Self {
        EpochGdConfig { first_epoch_len: s.first_epoch_len, first_step: s.first_step }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub domain: Option<DomainConfig>,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    pub budgets: Vec<u64>,
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub params: ParamRule,
    #[serde(default)]
    pub overrides: HyperOverrides,
    #[serde(default)]
    pub epoch_gd: EpochGdSettings,
    /// Off by default so that `raw.csv` is byte-identical across runs.
    #[serde(default)]
    pub record_wall_time: bool,
}

fn default_algorithms() -> Vec<Algorithm> {
    Algorithm::ALL.to_vec()
}

fn default_repetitions() -> u32 {
    10
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BenchError> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::Config(m));
        if self.algorithms.is_empty() {
            return bad("no algorithms selected".into());
        }
        if self.budgets.is_empty() {
            return bad("no budgets given".into());
        }
        if self.budgets[0] == 0 {
            return bad("budgets must be positive".into());
        }
        if let Some(w) = self.budgets.windows(2).find(|w| w[0] >= w[1]) {
            return bad(format!("budgets must be strictly increasing ({} then {})", w[0], w[1]));
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        match &self.problem {
            ProblemConfig::QuadraticPsd { dim, radius } => {
                if *dim == 0 {
                    return bad("quadratic dimension must be positive".into());
                }
                if radius.is_some_and(|r| !(r > 0.0 && r.is_finite())) {
                    return bad("quadratic radius must be positive".into());
                }
            }
            ProblemConfig::MetricLearning { reg_lambda, test_pairs, dataset } => {
                if !(*reg_lambda > 0.0 && reg_lambda.is_finite()) {
                    return bad(format!("reg_lambda must be positive, got {reg_lambda}"));
                }
                if *test_pairs == 0 {
                    return bad("test_pairs must be positive".into());
                }
                if let DatasetConfig::Synthetic { n, dim, separation, .. } = dataset {
                    if *n < 2 || !n.is_multiple_of(2) || *dim == 0 || !separation.is_finite() {
                        return bad("synthetic dataset needs an even n ≥ 2, dim ≥ 1 and a finite separation".into());
                    }
                }
            }
        }
        match self.domain {
            Some(DomainConfig::PsdConeCapped { radius } | DomainConfig::FrobBall { radius })
                if !(radius > 0.0 && radius.is_finite()) =>
            {
                return bad("domain radius must be positive".into());
            }
            _ => {}
        }
        if let ParamRule::HighProbability { delta } = self.params {
            if !(delta > 0.0 && delta < 1.0) {
                return bad(format!("delta must lie in (0, 1), got {delta}"));
            }
        }
        if self.overrides.eta.is_some_and(|e| !(e > 0.0 && e.is_finite())) {
            return bad("overridden eta must be positive".into());
        }
        if self.overrides.updates_per_epoch == Some(0) || self.overrides.initial_batch == Some(0) {
            return bad("overridden M and B1 must be positive".into());
        }
        if self.epoch_gd.first_epoch_len == 0 {
            return bad("epoch_gd.first_epoch_len must be positive".into());
        }
        Ok(())
    }

    /// CLI flag, then config, then environment, then `results`.
    pub fn resolve_output_dir(&self, cli: Option<&Path>) -> PathBuf {
        if let Some(p) = cli {
            return p.to_path_buf();
        }
        if let Some(p) = &self.output_dir {
            return p.clone();
        }
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => PathBuf::from(DEFAULT_OUTPUT_DIR),
        }
    }
}
