//! Per-(algorithm, T) means and sample standard deviations over repetitions.

use std::io::Write;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::runner::ResultRow;
use crate::BenchError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    #[serde(rename = "T")]
    pub budget: u64,
    /// Repetitions that produced a result.
    pub n: usize,
    pub final_objective_mean: Option<f64>,
    pub final_objective_std: Option<f64>,
    pub excess_risk_mean: Option<f64>,
    pub excess_risk_std: Option<f64>,
    #[serde(rename = "excess_times_T_mean")]
    pub excess_times_t_mean: Option<f64>,
    #[serde(rename = "excess_times_T_std")]
    pub excess_times_t_std: Option<f64>,
    pub total_projections_mean: Option<f64>,
    pub total_projections_std: Option<f64>,
    pub total_oracle_calls_mean: Option<f64>,
    pub total_oracle_calls_std: Option<f64>,
    pub wall_time_seconds_mean: Option<f64>,
    pub wall_time_seconds_std: Option<f64>,
}

pub const SUMMARY_HEADER: &str =
    "algorithm,T,n,final_objective_mean,final_objective_std,excess_risk_mean,excess_risk_std,\
excess_times_T_mean,excess_times_T_std,total_projections_mean,total_projections_std,\
total_oracle_calls_mean,total_oracle_calls_std,wall_time_seconds_mean,wall_time_seconds_std";

/// Mean and sample standard deviation; the deviation needs at least two values.
pub fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (Some(mean), None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (Some(mean), Some(var.sqrt()))
}

/// Groups rows by `(algorithm, T)` in order of first appearance.
/// Groups without a single successful row are skipped.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(&str, u64)> = Vec::new();
    for r in rows {
        let key = (r.algorithm.as_str(), r.budget);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut out = Vec::new();
    for (algorithm, budget) in keys {
        let group: Vec<&ResultRow> = rows
            .iter()
            .filter(|r| r.algorithm == algorithm && r.budget == budget && r.final_objective.is_some())
            .collect();
        if group.is_empty() {
            warn!("no successful runs for {algorithm} at T={budget}; skipped in summary");
            continue;
        }
        let stat = |f: &dyn Fn(&ResultRow) -> Option<f64>| {
            let v: Vec<f64> = group.iter().filter_map(|r| f(r)).collect();
            mean_std(&v)
        };
        let (fo_m, fo_s) = stat(&|r| r.final_objective);
        let (ex_m, ex_s) = stat(&|r| r.excess_risk);
        let (et_m, et_s) = stat(&|r| r.excess_times_t);
        let (pr_m, pr_s) = stat(&|r| r.total_projections.map(|v| v as f64));
        let (oc_m, oc_s) = stat(&|r| r.total_oracle_calls.map(|v| v as f64));
        let (wt_m, wt_s) = stat(&|r| r.wall_time_seconds);
        out.push(SummaryRow {
            algorithm: algorithm.to_string(),
            budget,
            n: group.len(),
            final_objective_mean: fo_m,
            final_objective_std: fo_s,
            excess_risk_mean: ex_m,
            excess_risk_std: ex_s,
            excess_times_t_mean: et_m,
            excess_times_t_std: et_s,
            total_projections_mean: pr_m,
            total_projections_std: pr_s,
            total_oracle_calls_mean: oc_m,
            total_oracle_calls_std: oc_s,
            wall_time_seconds_mean: wt_m,
            wall_time_seconds_std: wt_s,
        });
    }
    out
}

pub fn write_summary(out: impl Write, rows: &[SummaryRow]) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(SUMMARY_HEADER.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
