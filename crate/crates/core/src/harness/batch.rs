use std::io::{Read, Write};
use std::time::Instant;

use crate::error::{CcboError, Result};
use crate::problems::NamedExperiment;
use crate::solver::{DecayTrace, RunRecord};

use super::metrics::distance_d;

pub const BATCH_HEADER: [&str; 7] =
    ["seed", "converged", "steps", "distance_D", "final_objective", "constraint_value", "success"];
pub const TRACE_HEADER: [&str; 6] =
    ["step", "V_hat", "G_hat", "consensus_objective", "consensus_constraint", "spread"];

/// One line of a batch result file.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchRow {
    pub seed: u64,
    pub converged: bool,
    pub steps: u64,
    /// NaN when the problem has no known minimizer or the run failed.
    pub distance_d: f64,
    pub final_objective: f64,
    pub constraint_value: f64,
    pub success: bool,
}

impl BatchRow {
    fn from_record(experiment: &NamedExperiment, record: &RunRecord) -> Result<Self> {
        let out = record.output_point();
        let distance = match &experiment.problem.known_minimizer {
            Some(vstar) => distance_d(out, vstar)?,
            None => f64::NAN,
        };
        Ok(Self {
            seed: record.seed,
            converged: record.converged,
            steps: record.steps_total,
            distance_d: distance,
            final_objective: record.best_objective,
            constraint_value: record.best_constraint_value,
            success: experiment.success_rule.evaluate_record(&experiment.problem, record),
        })
    }

    fn failed(seed: u64) -> Self {
        Self {
            seed,
            converged: false,
            steps: 0,
            distance_d: f64::NAN,
            final_objective: f64::NAN,
            constraint_value: f64::NAN,
            success: false,
        }
    }

    fn is_failure(&self) -> bool {
        self.final_objective.is_nan()
    }
}

/// Aggregate statistics of a batch.
///
/// Distances and step counts average over every completed run. Relative
/// energy errors and constraint values average over successful runs only.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub n_runs: usize,
    pub n_success: usize,
    pub n_failed: usize,
    pub success_rate: f64,
    pub avg_distance: f64,
    pub avg_relative_error: f64,
    pub avg_constraint_value: f64,
    pub avg_total_steps: f64,
    pub wall_time_secs: f64,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

impl BatchSummary {
    /// Recomputes the summary from result rows; `known_minimum` feeds the
    /// relative energy error.
    pub fn from_rows(rows: &[BatchRow], known_minimum: Option<f64>) -> Self {
        let done: Vec<&BatchRow> = rows.iter().filter(|r| !r.is_failure()).collect();
        let ok: Vec<&BatchRow> = rows.iter().filter(|r| r.success).collect();
        let n_success = ok.len();
        Self {
            n_runs: rows.len(),
            n_success,
            n_failed: rows.len() - done.len(),
            success_rate: if rows.is_empty() { f64::NAN } else { n_success as f64 / rows.len() as f64 },
            avg_distance: mean(done.iter().map(|r| r.distance_d)),
            avg_relative_error: match known_minimum {
                Some(m) if m != 0.0 => mean(ok.iter().map(|r| ((r.final_objective - m) / m).abs())),
                _ => f64::NAN,
            },
            avg_constraint_value: mean(ok.iter().map(|r| r.constraint_value)),
            avg_total_steps: mean(done.iter().map(|r| r.steps as f64)),
            wall_time_secs: 0.0,
        }
    }

}

/// Runs `n_runs` independent seeds `base_seed, base_seed + 1, ...` of an
/// experiment on up to `jobs` worker threads. Failing runs are counted, not
/// propagated. Rows come back in seed order regardless of `jobs`.
pub fn run_batch(
    experiment: &NamedExperiment,
    n_runs: usize,
    base_seed: u64,
    jobs: usize,
) -> Result<(BatchSummary, Vec<BatchRow>)> {
    let mut config = experiment.config.clone();
    config.trace_stride = 0;
    config.validate()?;
    let exp = NamedExperiment { config, ..experiment.clone() };
    let start = Instant::now();
    let one = |i: usize| {
        let seed = base_seed.wrapping_add(i as u64);
        exp.run(seed)
            .and_then(|(record, _)| BatchRow::from_record(&exp, &record))
            .unwrap_or_else(|_| BatchRow::failed(seed))
    };
    let rows = run_indexed(n_runs, jobs.max(1), one)?;
    let mut summary = BatchSummary::from_rows(&rows, exp.problem.known_minimum);
    summary.wall_time_secs = start.elapsed().as_secs_f64();
    Ok((summary, rows))
}

#[cfg(feature = "parallel")]
fn run_indexed<F: Fn(usize) -> BatchRow + Sync>(n: usize, jobs: usize, f: F) -> Result<Vec<BatchRow>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CcboError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(&f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn run_indexed<F: Fn(usize) -> BatchRow + Sync>(n: usize, _jobs: usize, f: F) -> Result<Vec<BatchRow>> {
    Ok((0..n).map(f).collect())
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_batch_csv<W: Write>(out: W, rows: &[BatchRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BATCH_HEADER)?;
    for r in rows {
        w.write_record([
            r.seed.to_string(),
            r.converged.to_string(),
            r.steps.to_string(),
            fmt(r.distance_d),
            fmt(r.final_objective),
            fmt(r.constraint_value),
            r.success.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_batch_csv<R: Read>(input: R) -> Result<Vec<BatchRow>> {
    let mut rd = csv::Reader::from_reader(input);
    if rd.headers()?.iter().ne(BATCH_HEADER) {
        return Err(CcboError::Io(format!("unexpected header {:?}", rd.headers()?)));
    }
    let bad = |field: &str, v: &str| CcboError::Io(format!("bad {field} value {v:?}"));
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let get = |i: usize| rec.get(i).ok_or_else(|| CcboError::Io(format!("short row {rec:?}")));
        let float = |i: usize| -> Result<f64> { get(i)?.parse().map_err(|_| bad(BATCH_HEADER[i], &rec[i])) };
        let boolean = |i: usize| -> Result<bool> { get(i)?.parse().map_err(|_| bad(BATCH_HEADER[i], &rec[i])) };
        let int = |i: usize| -> Result<u64> { get(i)?.parse().map_err(|_| bad(BATCH_HEADER[i], &rec[i])) };
        rows.push(BatchRow {
            seed: int(0)?,
            converged: boolean(1)?,
            steps: int(2)?,
            distance_d: float(3)?,
            final_objective: float(4)?,
            constraint_value: float(5)?,
            success: boolean(6)?,
        });
    }
    Ok(rows)
}

pub fn write_trace_csv<W: Write>(out: W, trace: &DecayTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in &trace.records {
        w.write_record([
            r.step.to_string(),
            r.v_hat.map_or_else(String::new, fmt),
            fmt(r.g_hat),
            fmt(r.consensus_objective),
            fmt(r.consensus_constraint),
            fmt(r.spread),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::experiment;

    #[test]
    fn csv_round_trip_is_exact() {
        let rows = vec![
            BatchRow {
                seed: 7,
                converged: true,
                steps: 120,
                distance_d: 0.1 + 0.2,
                final_objective: std::f64::consts::PI,
                constraint_value: 1e-300,
                success: true,
            },
            BatchRow::failed(8),
        ];
        let mut buf = Vec::new();
        write_batch_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("seed,converged,steps,distance_D,final_objective,constraint_value,success\n"));
        let back = read_batch_csv(buf.as_slice()).unwrap();
        assert_eq!(back[0], rows[0]);
        assert!(back[1].is_failure() && back[1].seed == 8);
        let a = BatchSummary::from_rows(&rows, Some(3.0));
        let b = BatchSummary::from_rows(&back, Some(3.0));
        assert_eq!(a.n_failed, 1);
        assert_eq!(a.avg_distance.to_bits(), b.avg_distance.to_bits());
        assert_eq!(a.avg_relative_error.to_bits(), b.avg_relative_error.to_bits());
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(read_batch_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn batch_rows_follow_seed_order() {
        let mut e = experiment("quadratic-line").unwrap();
        e.config.n_particles = 10;
        e.config.max_steps = 30;
        let (s1, r1) = run_batch(&e, 4, 100, 1).unwrap();
        let (s2, r2) = run_batch(&e, 4, 100, 3).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![100, 101, 102, 103]);
        assert_eq!(s1.n_runs, 4);
        assert_eq!(s1.avg_distance.to_bits(), s2.avg_distance.to_bits());
    }
}
