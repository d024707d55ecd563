//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use logt_bench::{Algorithm, Experiment, ExperimentConfig, RunOutput};
use logt_core::data::{synth_clusters, LabeledPair};
use logt_core::linalg::sym_eig;
use logt_core::optim::{epoch_count_real, epoch_schedule, logt_solve, HyperParams, Monitor};
use logt_core::oracle::FnGradient;
use logt_core::problems::{
    metric_pair_gradient, metric_pair_loss, quad_noise, MetricLearningProblem, QuadraticPsdProblem,
};
use logt_core::{rng_from_seed, Domain, GradientOracle, OracleRng, StochasticGradient, SymMatrix};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn check(number: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let pass = result.pass && in_time;
    let limit_text = limit.map_or(String::new(), |l| format!(", limit {} s", l.as_secs()));
    println!(
        "criterion {number:>2} {} {name} ({:.2} s{limit_text}): {}{}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        result.detail,
        if in_time { "" } else { "; over the time limit" }
    );
    pass
}

fn random_sym(dim: usize, scale: f64, rng: &mut OracleRng) -> SymMatrix {
    SymMatrix::from_upper(dim, |_, _| rng.random_range(-scale..scale)).unwrap()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn quadratic_experiment(budgets: &[u64], reps: u32) -> Experiment {
    let budgets = budgets.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",");
    let cfg = ExperimentConfig::from_json(&format!(
        r#"{{"problem": {{"kind": "quadratic_psd", "dim": 5}}, "budgets": [{budgets}], "repetitions": {reps}}}"#
    ))
    .unwrap();
    Experiment::new(cfg).unwrap()
}

/// Mean of a result column per (algorithm, T).
fn group_means(out: &RunOutput, f: impl Fn(&logt_bench::ResultRow) -> Option<f64>) -> BTreeMap<(String, u64), f64> {
    let mut groups: BTreeMap<(String, u64), Vec<f64>> = BTreeMap::new();
    for r in &out.rows {
        if let Some(v) = f(r) {
            groups.entry((r.algorithm.clone(), r.budget)).or_default().push(v);
        }
    }
    groups.into_iter().map(|(k, v)| (k, mean(&v))).collect()
}

fn criterion_1() -> Outcome {
    let mut rng = rng_from_seed(1);
    let mut mismatches = 0;
    for _ in 0..200 {
        let m: u64 = rng.random_range(1..=20);
        let b1: u64 = rng.random_range(1..=8);
        let first = 2 * m * b1;
        let budget: u64 = rng.random_range(first..=first * 64);
        let params = HyperParams::new(0.1, m, b1, budget).unwrap();
        let mut oracle = GradientOracle::new(FnGradient::new(1, |w: &SymMatrix, _: &mut OracleRng| w.clone()));
        let mut domain = Domain::unconstrained(1);
        let trace = logt_solve(
            &mut oracle,
            &mut domain,
            &params,
            &SymMatrix::identity(1),
            &mut rng_from_seed(0),
            &Monitor::none(),
        )
        .unwrap();
        let plan = epoch_schedule(m, b1, budget);
        let k = trace.epochs.len() as u64;
        let ok = plan.len() as u64 == k
            && trace.total_projections == 2 * m * k
            && domain.projection_count() == 2 * m * k
            && trace.total_oracle_calls == 2 * m * b1 * ((1 << k) - 1)
            && oracle.call_count() == trace.total_oracle_calls
            && trace.total_oracle_calls <= budget
            && plan.last().map(|e| e.cumulative_calls) == Some(trace.total_oracle_calls);
        if !ok {
            mismatches += 1;
        }
    }
    let eta_lambda = 1.0 / 6f64.sqrt();
    let counts: Vec<(u64, u32, u32)> = [96u64, 960, 9600]
        .into_iter()
        .map(|t| {
            let expected = (t as f64 / 96.0 + 1.0).log2().floor() as u32;
            (t, epoch_count_real(4.0 / eta_lambda, 12.0 * eta_lambda, t as f64), expected)
        })
        .collect();
    let real_ok = counts.iter().all(|&(_, got, want)| got == want);
    outcome(
        mismatches == 0 && real_ok,
        format!(
            "{mismatches} of 200 random (M, B1, T) triples mismatch; unrounded epoch counts {:?} vs expected {:?}",
            counts.iter().map(|c| c.1).collect::<Vec<_>>(),
            counts.iter().map(|c| c.2).collect::<Vec<_>>()
        ),
    )
}

/// Least-squares slope of log10(y) against log10(x).
fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    let (mx, my) = (mean(&xs), mean(&ys));
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

fn criterion_2(out: &RunOutput) -> Outcome {
    let excess = group_means(out, |r| r.excess_risk);
    let scaled = group_means(out, |r| r.excess_times_t);
    let mut pass = out.failures.is_empty();
    let mut parts = Vec::new();
    for alg in Algorithm::ALL {
        let name = alg.name().to_string();
        let pts: Vec<(f64, f64)> =
            [1_000u64, 10_000, 100_000].iter().map(|&t| (t as f64, excess[&(name.clone(), t)])).collect();
        let slope = loglog_slope(&pts);
        let a = scaled[&(name.clone(), 10_000)];
        let b = scaled[&(name.clone(), 100_000)];
        let ratio = a.max(b) / a.min(b);
        pass &= (-1.3..=-0.7).contains(&slope) && ratio < 4.0;
        parts.push(format!("{name} slope {slope:.3}, excess·T {a:.2} → {b:.2} (×{ratio:.2})"));
    }
    outcome(pass, parts.join("; "))
}

/// Mean over seeds of the objective available after at most `p` projections.
fn baseline_objective_at(out: &RunOutput, alg: &str, budget: u64, p: u64) -> f64 {
    let mut per_seed: BTreeMap<u64, f64> = BTreeMap::new();
    for c in out.curves.iter().filter(|c| c.algorithm == alg && c.budget == budget && c.projections <= p) {
        per_seed.insert(c.seed, c.objective);
    }
    mean(&per_seed.into_values().collect::<Vec<_>>())
}

fn criterion_3(out: &RunOutput) -> Outcome {
    let t = 100_000u64;
    let projections = group_means(out, |r| r.total_projections.map(|v| v as f64));
    let objective = group_means(out, |r| r.final_objective);
    let logt_p = projections[&("logt".to_string(), t)];
    let sgd_p = projections[&("sgd".to_string(), t)];
    let epgd_p = projections[&("epoch_gd".to_string(), t)];
    let logt_obj = objective[&("logt".to_string(), t)];

    let mut grid: Vec<u64> = vec![logt_p as u64];
    grid.extend(out.curves.iter().filter(|c| c.budget == t && c.algorithm != "logt").map(|c| c.projections));
    grid.retain(|&p| p >= logt_p as u64);
    grid.sort_unstable();
    grid.dedup();
    let mut violations = Vec::new();
    for &p in &grid {
        for alg in ["sgd", "epoch_gd"] {
            let base = baseline_objective_at(out, alg, t, p);
            if logt_obj > base {
                violations.push((p, alg, base));
            }
        }
    }
    let at_total: Vec<String> = ["sgd", "epoch_gd"]
        .iter()
        .map(|a| format!("{a} {:.3e}", baseline_objective_at(out, a, t, logt_p as u64)))
        .collect();
    let matched_ok = violations.is_empty();
    let frugal_ok = logt_p <= 140.0;
    let baselines_ok = sgd_p >= (t - 10) as f64 && epgd_p >= (t - 10) as f64;
    let first_violation =
        violations.first().map_or("none".to_string(), |(p, a, b)| format!("first at P = {p} ({a} {b:.3e})"));
    outcome(
        frugal_ok && baselines_ok && matched_ok,
        format!(
            "logt projections {logt_p} (≤ 140: {frugal_ok}); sgd {sgd_p}, epoch_gd {epgd_p} (≥ {}: {baselines_ok}); \
             logt objective {logt_obj:.3e} vs baselines at P = {logt_p}: {}; matched-P violations {} of {} points, {first_violation}",
            t - 10,
            at_total.join(", "),
            violations.len(),
            grid.len() * 2
        ),
    )
}

fn criterion_4() -> Outcome {
    let cfg = ExperimentConfig::from_json(
        r#"{"problem": {"kind": "quadratic_psd", "dim": 5, "radius": 5.0}, "algorithms": ["logt"], "budgets": [10000], "repetitions": 30}"#,
    )
    .unwrap();
    let exp = Experiment::new(cfg).unwrap();
    let g = exp.spec().gradient_bound.unwrap();
    let mut finals = Vec::new();
    let mut per_epoch: Vec<Vec<f64>> = Vec::new();
    let mut budgets = Vec::new();
    for (_, t, seed) in exp.cells() {
        let trace = exp.run_cell(Algorithm::Logt, t, seed).unwrap();
        finals.push(exp.objective(&trace.final_iterate));
        per_epoch.resize(trace.epochs.len(), Vec::new());
        budgets = trace.epochs.iter().map(|e| e.risk_budget.unwrap()).collect();
        for (acc, e) in per_epoch.iter_mut().zip(&trace.epochs) {
            acc.push(e.measured_excess_risk.unwrap());
        }
    }
    let bound = 384.0 * g * g / 10_000.0;
    let final_mean = mean(&finals);
    let epoch_means: Vec<f64> = per_epoch.iter().map(|v| mean(v)).collect();
    let epochs_ok = epoch_means.iter().zip(&budgets).all(|(m, v)| m <= v);
    outcome(
        g == 10.0 && final_mean <= bound && epochs_ok,
        format!(
            "G = {g}; mean excess {final_mean:.3e} ≤ {bound}; per-epoch mean excess {:?} vs V_k {:?}",
            epoch_means.iter().map(|m| format!("{m:.3e}")).collect::<Vec<_>>(),
            budgets
        ),
    )
}

fn criterion_5() -> Outcome {
    let sigma = (1.0f64 / 3.0).sqrt();
    let n = 100_000;
    let mut worst_quad: f64 = 0.0;
    let problem = QuadraticPsdProblem::new(5);
    let mut prng = rng_from_seed(500);
    let points = [SymMatrix::zeros(5), SymMatrix::identity(5).scaled(0.5), quad_noise(5, &mut prng).scaled(2.0)];
    for (k, w) in points.iter().enumerate() {
        let mut oracle = GradientOracle::new(&problem);
        let mut rng = rng_from_seed(510 + k as u64);
        let mut acc = SymMatrix::zeros(5);
        for _ in 0..n {
            acc.add_scaled(1.0 / n as f64, &oracle.sample(w, &mut rng));
        }
        let gap = acc.max_abs_diff(&problem.gradient(w));
        worst_quad = worst_quad.max(gap / (sigma / (n as f64).sqrt()));
    }

    let data = synth_clusters(40, 3, 2.0, 5).unwrap();
    let metric = MetricLearningProblem::new(data, 0.1, 10, 5).unwrap();
    let mut worst_metric: f64 = 0.0;
    for (k, w) in [SymMatrix::zeros(3), SymMatrix::identity(3)].iter().enumerate() {
        let d = metric.data();
        let count = (d.len() * (d.len() - 1)) as f64;
        let mut exact = SymMatrix::zeros(3);
        let mut second = [0.0; 9];
        for i in 0..d.len() {
            for j in (0..d.len()).filter(|&j| j != i) {
                let g = metric_pair_gradient(w, &LabeledPair::from_indices(d, i, j), 0.1);
                exact.add_scaled(1.0 / count, &g);
                for (s, v) in second.iter_mut().zip(g.as_slice()) {
                    *s += v * v / count;
                }
            }
        }
        let sd = second.iter().zip(exact.as_slice()).map(|(s, m)| (s - m * m).max(0.0).sqrt()).fold(0.0, f64::max);
        let mut rng = rng_from_seed(520 + k as u64);
        let mut acc = SymMatrix::zeros(3);
        for _ in 0..n {
            acc.add_scaled(1.0 / n as f64, &metric.sample(w, &mut rng));
        }
        let gap = acc.plus_scaled(-1.0, &exact).frob_norm();
        worst_metric = worst_metric.max(gap / (sd / (n as f64).sqrt() * 3.0));
    }

    let mut worst_var: f64 = 0.0;
    for (i, b) in [1u64, 4, 16, 64].into_iter().enumerate() {
        let mut oracle = GradientOracle::new(&problem);
        let mut rng = rng_from_seed(530 + i as u64);
        let w = SymMatrix::identity(5);
        let draws: Vec<SymMatrix> = (0..10_000).map(|_| oracle.average_gradient(&w, b, &mut rng)).collect();
        for (r, c) in [(0, 0), (1, 3)] {
            let v: Vec<f64> = draws.iter().map(|g| g.get(r, c)).collect();
            let m = mean(&v);
            let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64;
            worst_var = worst_var.max((var * b as f64 / (1.0 / 3.0) - 1.0).abs());
        }
    }
    outcome(
        worst_quad <= 3.0 && worst_metric <= 1.0 && worst_var <= 0.15,
        format!(
            "quadratic worst entry gap {worst_quad:.2}σ/√n (≤ 3); metric gap {worst_metric:.2} of the 3σ·dim/√n band (≤ 1); \
             worst relative B·variance error {:.1}% (≤ 15%)",
            worst_var * 100.0
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = rng_from_seed(600);
    let mut psd = Domain::psd_cone(5);
    let mut idem: f64 = 0.0;
    for _ in 0..500 {
        let p = psd.project(&random_sym(5, 3.0, &mut rng)).unwrap();
        idem = idem.max(psd.project(&p).unwrap().max_abs_diff(&p));
    }
    let mut expansion: f64 = f64::NEG_INFINITY;
    for _ in 0..500 {
        let x = random_sym(5, 3.0, &mut rng);
        let y = random_sym(5, 3.0, &mut rng);
        let lhs = psd.project(&x).unwrap().plus_scaled(-1.0, &psd.project(&y).unwrap()).frob_norm();
        expansion = expansion.max(lhs - x.plus_scaled(-1.0, &y).frob_norm());
    }
    let mut small = Domain::psd_cone(3);
    let mut gap: f64 = f64::NEG_INFINITY;
    for _ in 0..100 {
        let x = random_sym(3, 2.0, &mut rng);
        let best = x.plus_scaled(-1.0, &small.project(&x).unwrap()).frob_norm();
        for _ in 0..1000 {
            let mut q = SymMatrix::zeros(3);
            for _ in 0..rng.random_range(1..=3) {
                let v: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
                q.add_rank_one(rng.random_range(0.0..2.0), &v);
            }
            gap = gap.max(best - x.plus_scaled(-1.0, &q).frob_norm());
        }
    }
    let tol = 1e-9;
    outcome(
        idem <= tol && expansion <= tol && gap <= tol,
        format!(
            "idempotence {idem:.1e}; worst ‖Px − Py‖ − ‖x − y‖ {expansion:.1e}; worst optimality gap {gap:.1e} (tolerance {tol:e})"
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = rng_from_seed(700);
    let (mut recon, mut orth): (f64, f64) = (0.0, 0.0);
    let mut failures = 0;
    for case in 0..1000 {
        let a = random_sym(2 + case % 9, 1.0, &mut rng);
        match sym_eig(&a) {
            Ok(e) => {
                recon = recon.max(e.reconstruct().plus_scaled(-1.0, &a).frob_norm());
                orth = orth.max(e.orthogonality_error());
            }
            Err(_) => failures += 1,
        }
    }
    outcome(
        failures == 0 && recon <= 1e-8 && orth <= 1e-8,
        format!("worst reconstruction {recon:.1e}, worst orthogonality {orth:.1e}, {failures} solver failures"),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = rng_from_seed(800);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let dim = 2 + case % 5;
        let m = quad_noise(dim, &mut rng).scaled(0.7);
        let xi: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
        let xj: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
        let y = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let pair = LabeledPair { first: &xi, second: &xj, agreement: y };
        let g = metric_pair_gradient(&m, &pair, 0.1);
        let fd = SymMatrix::from_upper(dim, |i, j| {
            let dir = SymMatrix::from_upper(dim, |a, b| if (a, b) == (i, j) { 1.0 } else { 0.0 }).unwrap();
            let d = (metric_pair_loss(&m.plus_scaled(h, &dir), &pair, 0.1)
                - metric_pair_loss(&m.plus_scaled(-h, &dir), &pair, 0.1))
                / (2.0 * h);
            if i == j {
                d
            } else {
                d / 2.0
            }
        })
        .unwrap();
        worst = worst.max(fd.plus_scaled(-1.0, &g).frob_norm() / g.frob_norm().max(1e-12));
    }
    outcome(worst <= 1e-5, format!("worst relative error {worst:.2e} over 100 instances (≤ 1e-5)"))
}

fn criterion_9() -> Outcome {
    let cfg = ExperimentConfig::from_json(
        r#"{
            "problem": {"kind": "metric_learning", "dataset": {"source": "synthetic", "n": 2000, "dim": 10}, "reg_lambda": 0.1},
            "algorithms": ["logt", "epoch_gd"],
            "budgets": [200000],
            "repetitions": 10
        }"#,
    )
    .unwrap();
    let exp = Experiment::new(cfg).unwrap();
    let out = exp.run();
    let obj = group_means(&out, |r| r.final_objective);
    let proj = group_means(&out, |r| r.total_projections.map(|v| v as f64));
    let key = |a: &str| (a.to_string(), 200_000u64);
    let (lo, eo) = (obj[&key("logt")], obj[&key("epoch_gd")]);
    let (lp, ep) = (proj[&key("logt")], proj[&key("epoch_gd")]);
    let rel = (lo - eo).abs() / eo;
    outcome(
        out.failures.is_empty() && rel <= 0.05 && lp <= 0.05 * ep,
        format!(
            "L = {:.3}; objective logt {lo:.5} vs epoch_gd {eo:.5} ({:.3}% apart, ≤ 5%); projections {lp} vs {ep} ({:.2}%, ≤ 5%)",
            exp.spec().smoothness,
            rel * 100.0,
            100.0 * lp / ep
        ),
    )
}

fn criterion_10() -> Outcome {
    let configs = [
        r#"{"problem": {"kind": "quadratic_psd", "dim": 4}, "budgets": [500, 5000], "repetitions": 3, "base_seed": 42}"#,
        r#"{"problem": {"kind": "metric_learning", "dataset": {"source": "synthetic", "n": 200, "dim": 4, "seed": 9}, "test_pairs": 500},
            "budgets": [20000], "repetitions": 2, "base_seed": 7}"#,
    ];
    let mut identical = 0;
    for text in configs {
        let raw: Vec<Vec<u8>> = (0..2)
            .map(|_| {
                let dir = tempfile::tempdir().unwrap();
                let exp = Experiment::new(ExperimentConfig::from_json(text).unwrap()).unwrap();
                exp.run().write_to(dir.path()).unwrap();
                std::fs::read(dir.path().join("raw.csv")).unwrap()
            })
            .collect();
        if raw[0] == raw[1] && !raw[0].is_empty() {
            identical += 1;
        }
    }
    outcome(
        identical == configs.len(),
        format!("{identical} of {} configs produced byte-identical raw.csv", configs.len()),
    )
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut results = Vec::new();
    results.push(check(1, "projection-count law", Some(secs(1)), criterion_1));

    let start = Instant::now();
    let quad = quadratic_experiment(&[1_000, 10_000, 100_000], 10).run();
    let shared = start.elapsed();
    results.push(check(2, "O(1/T) plateau", Some(secs(120)), || {
        let mut o = criterion_2(&quad);
        o.detail = format!("{}; grid run {:.2} s", o.detail, shared.as_secs_f64());
        o.pass &= shared <= secs(120);
        o
    }));
    results.push(check(3, "projection frugality", Some(secs(120)), || criterion_3(&quad)));
    results.push(check(4, "expected risk bound", Some(secs(60)), criterion_4));
    results.push(check(5, "oracle statistics", Some(secs(30)), criterion_5));
    results.push(check(6, "projection correctness", Some(secs(30)), criterion_6));
    results.push(check(7, "eigensolver", Some(secs(30)), criterion_7));
    results.push(check(8, "metric-learning gradient", Some(secs(10)), criterion_8));
    results.push(check(9, "metric learning with few projections", Some(secs(300)), criterion_9));
    results.push(check(10, "determinism", None, criterion_10));

    let failed = results.iter().filter(|p| !**p).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
