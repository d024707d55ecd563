use std::fs::File;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{error, info};
use logt_bench::report::{summarize, write_summary};
use logt_bench::runner::read_raw;
use logt_bench::{BenchError, Experiment, ExperimentConfig};
use logt_core::optim::{epoch_count_real, epoch_schedule, theorem1_params, theorem2_alpha, theorem2_params};
use logt_core::ProblemSpec;

#[derive(Parser)]
#[command(name = "logt-bench", version, about = "Compare LogT with projected SGD baselines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment grid described by a JSON config.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config and LOGT_BENCH_OUTPUT_DIR).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Repetition count override.
        #[arg(long)]
        reps: Option<u32>,
    },
    /// Aggregate a raw.csv into per-(algorithm, T) means and standard deviations.
    Report {
        raw: PathBuf,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the LogT epoch plan.
    Schedule {
        #[arg(long = "M")]
        m: u64,
        #[arg(long = "B1")]
        b1: u64,
        #[arg(long = "T")]
        t: u64,
    },
    /// Print LogT parameters for given problem constants.
    Params {
        #[arg(long = "L")]
        smoothness: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long = "T")]
        t: u64,
        /// Also print the high-probability setting for confidence 1 − delta.
        #[arg(long)]
        delta: Option<f64>,
        /// Oracle norm bound, for the expected risk bound.
        #[arg(long = "G")]
        g: Option<f64>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let code = match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            error!("{e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn execute(command: Command) -> Result<i32, BenchError> {
    match command {
        Command::Run { config, out, seed, reps } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            if let Some(r) = reps {
                cfg.repetitions = r;
            }
            let dir = cfg.resolve_output_dir(out.as_deref());
            let experiment = Experiment::new(cfg)?;
            info!("running {} cells", experiment.cells().len());
            let output = experiment.run();
            for path in output.write_to(&dir)? {
                info!("wrote {}", path.display());
            }
            if !output.failures.is_empty() {
                error!("{} of {} cells failed", output.failures.len(), output.rows.len());
            }
            Ok(output.exit_code())
        }
        Command::Report { raw, out } => {
            let summary = summarize(&read_raw(&raw)?);
            match out {
                Some(path) => write_summary(File::create(path)?, &summary)?,
                None => write_summary(io::stdout().lock(), &summary)?,
            }
            Ok(0)
        }
        Command::Schedule { m, b1, t } => {
            if m == 0 || b1 == 0 {
                return Err(BenchError::Config("M and B1 must be positive".into()));
            }
            println!("epoch,batch_size,oracle_calls,cumulative_calls,cumulative_projections");
            let mut previous = 0;
            for e in epoch_schedule(m, b1, t) {
                println!(
                    "{},{},{},{},{}",
                    e.epoch,
                    e.batch_size,
                    e.cumulative_calls - previous,
                    e.cumulative_calls,
                    2 * m * u64::from(e.epoch)
                );
                previous = e.cumulative_calls;
            }
            Ok(0)
        }
        Command::Params { smoothness, lambda, t, delta, g } => {
            let mut spec = ProblemSpec::new(lambda, smoothness).map_err(|e| BenchError::Config(e.to_string()))?;
            if let Some(g) = g {
                spec = spec.with_gradient_bound(g).map_err(|e| BenchError::Config(e.to_string()))?;
            }
            let eta = 1.0 / (6f64.sqrt() * smoothness);
            println!("expected-risk setting");
            println!("  eta = {eta}");
            println!("  M (unrounded) = {}", 4.0 / (eta * lambda));
            println!("  B1 (unrounded) = {}", 12.0 * eta * lambda);
            println!(
                "  epochs (unrounded M, B1) = {}",
                epoch_count_real(4.0 / (eta * lambda), 12.0 * eta * lambda, t as f64)
            );
            let p = theorem1_params(&spec, t)?;
            print_plan(p.updates_per_epoch, p.initial_batch, t, &p.to_string());
            if let Some(g) = spec.gradient_bound {
                println!("  expected excess risk bound = {}", 384.0 * g * g / (lambda * t as f64));
            }
            if let Some(delta) = delta {
                let hp = theorem2_alpha(delta, t, p.updates_per_epoch, eta, lambda)?;
                println!("high-probability setting (delta = {delta})");
                println!("  alpha = {}", hp.alpha);
                println!("  k_dagger = {}", hp.k_dagger);
                println!("  N = {}", hp.n_log);
                println!("  delta_tilde = {}", hp.delta_tilde);
                if hp.settled_from_cycle {
                    println!("  (k_dagger alternated; settled conservatively)");
                }
                let (p, _) = theorem2_params(&spec, t, delta)?;
                print_plan(p.updates_per_epoch, p.initial_batch, t, &p.to_string());
            }
            Ok(0)
        }
    }
}

fn print_plan(m: u64, b1: u64, t: u64, params: &str) {
    let plan = epoch_schedule(m, b1, t);
    println!("  {params}");
    println!("  epochs = {}", plan.len());
    println!("  projections = {}", 2 * m * plan.len() as u64);
    println!("  oracle calls used = {}", plan.last().map_or(0, |e| e.cumulative_calls));
}
