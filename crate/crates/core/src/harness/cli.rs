//! `ccbo` command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::SolverConfig;
use crate::error::CcboError;
use crate::problems::{experiment, list_experiments, make_ackley_comparison, ComparisonCase, NamedExperiment};

use super::batch::{run_batch, write_batch_csv, write_trace_csv, BatchSummary};
use super::config_file::load_config_file;
use super::metrics::distance_d;

#[derive(Parser, Debug)]
#[command(
    name = "ccbo",
    version,
    about = "Constrained consensus-based optimization",
    after_help = "Any solver parameter can be overridden with --param.<name> <value>, e.g. --param.alpha 30."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Base seed; batch runs use seed, seed + 1, ...
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON file of parameter overrides.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct BatchArgs {
    /// Number of runs (defaults to the experiment's own count).
    #[arg(long)]
    runs: Option<usize>,
    /// Worker threads (defaults to CCBO_JOBS, then the number of CPUs).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single run; prints the run record.
    Run {
        experiment: String,
        #[command(flatten)]
        common: Common,
        /// Write the per-step trace to this CSV file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Independent runs; prints the summary, writes per-run rows as CSV.
    Batch {
        experiment: String,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        batch: BatchArgs,
        /// CSV destination; rows go to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Paired-seed comparison against the penalized and projected baselines.
    Compare {
        /// a, b, c or ackley-case-<letter>
        case: String,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        batch: BatchArgs,
    },
    /// Batch over a grid of values of one parameter.
    Sweep {
        experiment: String,
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        batch: BatchArgs,
    },
    /// Registered experiment names.
    List,
}

enum Failure {
    Usage(String),
    Runtime(CcboError),
}

impl From<CcboError> for Failure {
    fn from(e: CcboError) -> Self {
        Failure::Runtime(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

/// Removes `--param.<name> <value>` and `--param.<name>=<value>` pairs.
fn split_param_flags(argv: Vec<String>) -> std::result::Result<(Vec<String>, Vec<(String, String)>), String> {
    let mut rest = Vec::new();
    let mut params = Vec::new();
    let mut it = argv.into_iter();
    while let Some(arg) = it.next() {
        let Some(spec) = arg.strip_prefix("--param.") else {
            rest.push(arg);
            continue;
        };
        let (name, value) = match spec.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => (spec.to_string(), it.next().ok_or_else(|| format!("{arg} needs a value"))?),
        };
        if name.is_empty() {
            return Err(format!("malformed flag {arg}"));
        }
        params.push((name, value));
    }
    Ok((rest, params))
}

fn configure(config: &mut SolverConfig, common: &Common, params: &[(String, String)]) -> std::result::Result<(), Failure> {
    if let Some(path) = &common.config {
        load_config_file(config, path)?;
    }
    for (name, value) in params {
        config.set(name, value).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    config.validate().map_err(|e| Failure::Usage(e.to_string()))
}

fn lookup(name: &str) -> std::result::Result<NamedExperiment, Failure> {
    experiment(name).map_err(|e| Failure::Usage(e.to_string()))
}

fn default_jobs() -> usize {
    std::env::var("CCBO_JOBS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&j| j > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn fmt_summary(s: &BatchSummary) -> String {
    format!(
        "runs={} success={} failed={} success_rate={:.4} avg_distance={:.6e} avg_relative_error={:.6e} \
         avg_constraint_value={:.6e} avg_total_steps={:.1} wall_time_secs={:.2}",
        s.n_runs,
        s.n_success,
        s.n_failed,
        s.success_rate,
        s.avg_distance,
        s.avg_relative_error,
        s.avg_constraint_value,
        s.avg_total_steps,
        s.wall_time_secs
    )
}

fn vec_str(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.16e}")).collect();
    format!("[{}]", items.join(", "))
}

fn execute(cli: Cli, params: &[(String, String)], out: &mut dyn Write) -> std::result::Result<(), Failure> {
    match cli.command {
        Command::List => {
            for name in list_experiments() {
                writeln!(out, "{name}")?;
            }
        }
        Command::Run { experiment, common, trace } => {
            let mut e = lookup(&experiment)?;
            configure(&mut e.config, &common, params)?;
            if trace.is_none() {
                e.config.trace_stride = 0;
            }
            let (record, tr) = e.run(common.seed)?;
            let success = e.success_rule.evaluate_record(&e.problem, &record);
            writeln!(out, "experiment: {}", e.name)?;
            writeln!(out, "algorithm: {}", e.algorithm.label())?;
            writeln!(out, "seed: {}", record.seed)?;
            writeln!(out, "converged: {}", record.converged)?;
            writeln!(out, "stop_reason: {:?}", record.stop_reason)?;
            writeln!(out, "steps: {}", record.steps_total)?;
            writeln!(out, "restarts: {}", record.restarts)?;
            writeln!(out, "consensus: {}", vec_str(record.output_point()))?;
            writeln!(out, "objective: {:.16e}", record.best_objective)?;
            writeln!(out, "constraint_value: {:.16e}", record.best_constraint_value)?;
            if let Some(vstar) = &e.problem.known_minimizer {
                writeln!(out, "distance_D: {:.16e}", distance_d(record.output_point(), vstar)?)?;
            }
            writeln!(out, "damped_solves: {}", record.n_damped_solves)?;
            writeln!(out, "success: {success}")?;
            if let Some(path) = trace {
                write_trace_csv(std::fs::File::create(&path)?, &tr)?;
            }
        }
        Command::Batch { experiment, common, batch, out: csv_path } => {
            let mut e = lookup(&experiment)?;
            configure(&mut e.config, &common, params)?;
            let runs = batch.runs.unwrap_or(e.n_runs);
            if runs == 0 {
                return Err(Failure::Usage("--runs must be at least 1".into()));
            }
            let (summary, rows) = run_batch(&e, runs, common.seed, batch.jobs.unwrap_or_else(default_jobs))?;
            match csv_path {
                Some(path) => write_batch_csv(std::fs::File::create(&path)?, &rows)?,
                None => write_batch_csv(&mut *out, &rows)?,
            }
            writeln!(out, "# {}: {}", e.name, fmt_summary(&summary))?;
        }
        Command::Compare { case, common, batch } => {
            let letter = case.strip_prefix("ackley-case-").unwrap_or(&case);
            let case = ComparisonCase::parse(letter)
                .ok_or_else(|| Failure::Usage(format!("unknown comparison case {case:?}")))?;
            let jobs = batch.jobs.unwrap_or_else(default_jobs);
            writeln!(out, "{:<28} {:>12} {:>14}", "method", "success_rate", "avg_distance")?;
            for mut e in make_ackley_comparison(case)? {
                configure(&mut e.config, &common, params)?;
                let runs = batch.runs.unwrap_or(e.n_runs).max(1);
                let (s, _) = run_batch(&e, runs, common.seed, jobs)?;
                writeln!(out, "{:<28} {:>12.4} {:>14.6e}", e.algorithm.label(), s.success_rate, s.avg_distance)?;
            }
        }
        Command::Sweep { experiment, param, values, common, batch } => {
            let base = lookup(&experiment)?;
            let jobs = batch.jobs.unwrap_or_else(default_jobs);
            writeln!(out, "{param},success_rate,avg_distance,avg_relative_error,avg_total_steps")?;
            for value in values {
                let mut e = base.clone();
                let mut overrides = params.to_vec();
                overrides.push((param.clone(), value.clone()));
                configure(&mut e.config, &common, &overrides)?;
                let runs = batch.runs.unwrap_or(e.n_runs).max(1);
                let (s, _) = run_batch(&e, runs, common.seed, jobs)?;
                writeln!(
                    out,
                    "{value},{:.16e},{:.16e},{:.16e},{:.16e}",
                    s.success_rate, s.avg_distance, s.avg_relative_error, s.avg_total_steps
                )?;
            }
        }
    }
    Ok(())
}

/// Runs the CLI with explicit output streams and returns the exit code.
pub fn cli_main_with(argv: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (argv, params) = match split_param_flags(argv) {
        Ok(split) => split,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli, &params, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Runtime(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

/// Runs the CLI on the process's stdout and stderr.
pub fn cli_main(argv: Vec<String>) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    cli_main_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
