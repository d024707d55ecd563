//! Runs the (algorithm × budget × repetition) grid.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use log::{info, warn};
use logt_core::data::{load_libsvm, synth_clusters};
use logt_core::optim::{
    epoch_gd_solve, logt_solve, sgd_solve, theorem1_params, theorem2_params, EpochGdConfig, Monitor,
};
use logt_core::problems::{MetricLearningProblem, QuadraticPsdProblem};
use logt_core::{
    rng_from_seed, Domain, DomainKind, GradientOracle, HyperParams, Objective, OptimError, ProblemSpec, RunTrace,
    StochasticGradient, SymMatrix,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, DatasetConfig, ExperimentConfig, ParamRule, ProblemConfig};
use crate::report::summarize;
use crate::BenchError;

/// One line of `raw.csv`. Failed cells keep their identifying columns and
/// leave every measurement empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub algorithm: String,
    #[serde(rename = "T")]
    pub budget: u64,
    pub seed: u64,
    pub final_objective: Option<f64>,
    pub excess_risk: Option<f64>,
    #[serde(rename = "excess_times_T")]
    pub excess_times_t: Option<f64>,
    pub total_projections: Option<u64>,
    pub total_oracle_calls: Option<u64>,
    pub wall_time_seconds: Option<f64>,
}

pub const RAW_HEADER: &str =
    "algorithm,T,seed,final_objective,excess_risk,excess_times_T,total_projections,total_oracle_calls,wall_time_seconds";

/// One objective snapshot in `curves.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub algorithm: String,
    #[serde(rename = "T")]
    pub budget: u64,
    pub seed: u64,
    pub projections: u64,
    pub oracle_calls: u64,
    pub objective: f64,
    pub excess_risk: Option<f64>,
}

pub const CURVES_HEADER: &str = "algorithm,T,seed,projections,oracle_calls,objective,excess_risk";

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub algorithm: Algorithm,
    pub budget: u64,
    pub seed: u64,
    pub message: String,
    pub numerical: bool,
}

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub curves: Vec<CurveRow>,
    pub failures: Vec<CellFailure>,
}

impl RunOutput {
    /// 0 when every cell succeeded, 3 if any failed numerically, otherwise 2.
    pub fn exit_code(&self) -> i32 {
        if self.failures.iter().any(|f| f.numerical) {
            3
        } else if self.failures.is_empty() {
            0
        } else {
            2
        }
    }

    /// Writes `raw.csv`, `summary.csv` and `curves.csv` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
        fs::create_dir_all(dir)?;
        let raw = dir.join("raw.csv");
        write_rows(&raw, RAW_HEADER, &self.rows)?;
        let summary = dir.join("summary.csv");
        crate::report::write_summary(File::create(&summary)?, &summarize(&self.rows))?;
        let curves = dir.join("curves.csv");
        write_rows(&curves, CURVES_HEADER, &self.curves)?;
        Ok(vec![raw, summary, curves])
    }
}

/// Serializes `rows` with an explicit header so that empty outputs still carry one.
pub(crate) fn write_rows<T: Serialize>(path: &Path, header: &str, rows: &[T]) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

enum Problem {
    Quadratic(QuadraticPsdProblem),
    Metric(Box<MetricLearningProblem>),
}

/// A validated configuration with its problem instance built.
pub struct Experiment {
    cfg: ExperimentConfig,
    problem: Problem,
    domain: DomainKind,
}

impl Experiment {
    pub fn new(cfg: ExperimentConfig) -> Result<Self, BenchError> {
        cfg.validate()?;
        let problem = match &cfg.problem {
            ProblemConfig::QuadraticPsd { dim, radius } => Problem::Quadratic(match radius {
                Some(r) => QuadraticPsdProblem::with_radius(*dim, *r),
                None => QuadraticPsdProblem::new(*dim),
            }),
            ProblemConfig::MetricLearning { dataset, reg_lambda, test_pairs } => {
                let data = match dataset {
                    DatasetConfig::Synthetic { n, dim, separation, seed } => {
                        synth_clusters(*n, *dim, *separation, *seed)?
                    }
                    DatasetConfig::Libsvm { path, expected_dim } => load_libsvm(path, *expected_dim)?.normalized(),
                };
                let problem = MetricLearningProblem::new(data, *reg_lambda, *test_pairs, cfg.base_seed)?;
                info!(
                    "metric learning: n = {}, d = {}, L = {:.4}, lambda = {}",
                    problem.data().len(),
                    problem.dim(),
                    problem.spec().smoothness,
                    problem.spec().lambda
                );
                Problem::Metric(Box::new(problem))
            }
        };
        let dim = match &problem {
            Problem::Quadratic(p) => p.dim(),
            Problem::Metric(p) => p.dim(),
        };
        let domain = match (cfg.domain, &cfg.problem) {
            (Some(d), _) => d.kind(dim),
            (None, ProblemConfig::QuadraticPsd { radius: Some(radius), .. }) => {
                DomainKind::PsdConeCapped { dim, radius: *radius }
            }
            (None, _) => DomainKind::PsdCone { dim },
        };
        Ok(Experiment { cfg, problem, domain })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    pub fn spec(&self) -> &ProblemSpec {
        match &self.problem {
            Problem::Quadratic(p) => p.spec(),
            Problem::Metric(p) => p.spec(),
        }
    }

    pub fn domain_kind(&self) -> DomainKind {
        self.domain
    }

    /// Objective of the configured problem (the test-pair estimate for metric learning).
    pub fn objective(&self, w: &SymMatrix) -> f64 {
        match &self.problem {
            Problem::Quadratic(p) => p.value(w),
            Problem::Metric(p) => p.value(w),
        }
    }

    /// LogT settings for budget `T`: the configured rule, then any overrides.
    pub fn logt_params(&self, budget: u64) -> Result<HyperParams, OptimError> {
        let spec = self.spec();
        let base = match self.cfg.params {
            ParamRule::Expected => theorem1_params(spec, budget)?,
            ParamRule::HighProbability { delta } => theorem2_params(spec, budget, delta)?.0,
        };
        let o = &self.cfg.overrides;
        HyperParams::new(
            o.eta.unwrap_or(base.eta),
            o.updates_per_epoch.unwrap_or(base.updates_per_epoch),
            o.initial_batch.unwrap_or(base.initial_batch),
            budget,
        )
    }

    /// Runs one cell of the grid from a fresh oracle, domain and RNG.
    pub fn run_cell(&self, algorithm: Algorithm, budget: u64, seed: u64) -> Result<RunTrace, OptimError> {
        match &self.problem {
            Problem::Quadratic(p) => self.solve(p, p.starting_point(), algorithm, budget, seed),
            Problem::Metric(p) => self.solve(p.as_ref(), p.starting_point(), algorithm, budget, seed),
        }
    }

    fn solve<P>(
        &self,
        problem: &P,
        w0: SymMatrix,
        algorithm: Algorithm,
        budget: u64,
        seed: u64,
    ) -> Result<RunTrace, OptimError>
    where
        P: StochasticGradient + Objective,
    {
        let spec = self.spec();
        let mut oracle = GradientOracle::new(problem);
        if let Some(g) = spec.gradient_bound {
            oracle = oracle.with_bound(g);
        }
        let mut domain = Domain::new(self.domain);
        let mut rng = rng_from_seed(seed);
        let monitor = Monitor::new(problem, spec);
        match algorithm {
            Algorithm::Logt => {
                let params = self.logt_params(budget)?;
                logt_solve(&mut oracle, &mut domain, &params, &w0, &mut rng, &monitor)
            }
            Algorithm::EpochGd => {
                let config = EpochGdConfig::from(self.cfg.epoch_gd);
                epoch_gd_solve(&mut oracle, &mut domain, spec, budget, &w0, &config, &mut rng, &monitor)
            }
            Algorithm::Sgd => sgd_solve(&mut oracle, &mut domain, spec.lambda, budget, &w0, &mut rng, &monitor),
        }
    }

    /// Grid cells in output order: algorithm, then budget, then repetition.
    pub fn cells(&self) -> Vec<(Algorithm, u64, u64)> {
        let mut cells = Vec::new();
        for &a in &self.cfg.algorithms {
            for &t in &self.cfg.budgets {
                for r in 0..self.cfg.repetitions {
                    cells.push((a, t, self.cfg.base_seed.wrapping_add(u64::from(r))));
                }
            }
        }
        cells
    }

    /// Runs every cell (in parallel) and merges results in grid order.
    pub fn run(&self) -> RunOutput {
        let results: Vec<_> =
            self.cells().into_par_iter().map(|(a, t, seed)| (a, t, seed, self.run_cell(a, t, seed))).collect();
        let mut out = RunOutput::default();
        for (algorithm, budget, seed, result) in results {
            match result {
                Ok(trace) => {
                    out.rows.push(self.result_row(algorithm, budget, seed, &trace));
                    out.curves.extend(trace.checkpoints.iter().map(|c| CurveRow {
                        algorithm: algorithm.name().to_string(),
                        budget,
                        seed,
                        projections: c.projections,
                        oracle_calls: c.oracle_calls,
                        objective: c.objective,
                        excess_risk: c.excess_risk,
                    }));
                }
                Err(e) => {
                    warn!("{algorithm} T={budget} seed={seed} failed: {e}");
                    out.rows.push(ResultRow {
                        algorithm: algorithm.name().to_string(),
                        budget,
                        seed,
                        final_objective: None,
                        excess_risk: None,
                        excess_times_t: None,
                        total_projections: None,
                        total_oracle_calls: None,
                        wall_time_seconds: None,
                    });
                    out.failures.push(CellFailure {
                        algorithm,
                        budget,
                        seed,
                        message: e.to_string(),
                        numerical: e.is_numerical(),
                    });
                }
            }
        }
        out
    }

    fn result_row(&self, algorithm: Algorithm, budget: u64, seed: u64, trace: &RunTrace) -> ResultRow {
        let objective = self.objective(&trace.final_iterate);
        let excess = self.spec().optimum_value.map(|opt| objective - opt);
        ResultRow {
            algorithm: algorithm.name().to_string(),
            budget,
            seed,
            final_objective: Some(objective),
            excess_risk: excess,
            excess_times_t: excess.map(|e| e * budget as f64),
            total_projections: Some(trace.total_projections),
            total_oracle_calls: Some(trace.total_oracle_calls),
            wall_time_seconds: self.cfg.record_wall_time.then_some(trace.wall_time_seconds),
        }
    }
}

/// Loads a `raw.csv` back into rows.
pub fn read_raw(path: &Path) -> Result<Vec<ResultRow>, BenchError> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != RAW_HEADER {
        return Err(BenchError::Config(format!("{} does not have the raw.csv header", path.display())));
    }
    let rows = r.deserialize().collect::<Result<Vec<ResultRow>, _>>()?;
    Ok(rows)
}
