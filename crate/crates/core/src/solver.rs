//! Control loops: the single-pass constrained solver and the restart
//! variant with independent noise kicks.

use crate::config::SolverConfig;
use crate::consensus::{consensus_from_energies, ConsensusPoint};
use crate::constraints::ConstraintSet;
use crate::dynamics::{independent_noise_kick, semi_implicit_step};
use crate::ensemble::{init_ensemble, Ensemble};
use crate::error::{CcboError, Result};
use crate::par;
use crate::problem::Problem;
use crate::rng::RngStream;

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Ensemble spread fell to `eps_stop`.
    SpreadThreshold,
    /// Consecutive restarts agreed to within `eps_indep`.
    RestartThreshold,
    /// `max_steps` (single pass) or `max_total_steps` (restarts) exhausted.
    StepCap,
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub steps_total: u64,
    /// Consensus point when the last inner loop stopped.
    pub final_consensus: Vec<f64>,
    pub final_objective: f64,
    /// `sum_i |g_i|` at `final_consensus`.
    pub final_constraint_value: f64,
    /// Best consensus over all inner loops (equal to the final one for a single pass).
    pub best_consensus: Vec<f64>,
    pub best_objective: f64,
    pub best_constraint_value: f64,
    pub restarts: usize,
    pub n_damped_solves: usize,
    /// Largest `(1/N) sum_j |V^j|^2` seen during the run.
    pub max_second_moment: f64,
    /// Largest `(1/N) sum_j |V^j|^4` seen during the run.
    pub max_fourth_moment: f64,
}

impl RunRecord {
    /// The point the run reports as its answer.
    pub fn output_point(&self) -> &[f64] {
        &self.best_consensus
    }
}

/// Diagnostics recorded at one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub step: u64,
    /// `(1/2N) sum_j |V^j - v*|^2`, when the minimizer is known.
    pub v_hat: Option<f64>,
    /// `(1/N) sum_j G(V^j)`.
    pub g_hat: f64,
    pub consensus_objective: f64,
    pub consensus_constraint: f64,
    /// `(1/dN) sum_j |V^j - v_alpha|^2`.
    pub spread: f64,
}

/// Per-step time series of a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecayTrace {
    pub records: Vec<TraceRecord>,
}

/// `(1/dN) sum_j |V^j - v_alpha|^2`.
pub fn spread(ensemble: &Ensemble, consensus: &ConsensusPoint) -> f64 {
    let total: f64 = ensemble
        .particles()
        .map(|p| p.iter().zip(&consensus.point).map(|(x, c)| (x - c) * (x - c)).sum::<f64>())
        .sum();
    total / (ensemble.dim() * ensemble.n()) as f64
}

/// True once the ensemble spread around the consensus point is at most `eps_stop`.
pub fn check_stop(ensemble: &Ensemble, consensus: &ConsensusPoint, eps_stop: f64) -> bool {
    spread(ensemble, consensus) <= eps_stop
}

/// Hook applied to the ensemble after each step (used by the projected baseline).
pub(crate) type PostStep<'a> = &'a (dyn Fn(&mut Ensemble) + Sync);

/// Shared machinery for every CBO-style loop in the crate.
pub(crate) struct Driver<'a> {
    pub problem: &'a Problem,
    pub config: &'a SolverConfig,
    pub rng: RngStream,
    /// Objective used for the Gibbs weights.
    pub weight_objective: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    /// Constraints whose forcing enters the step (may be empty).
    pub forcing: &'a ConstraintSet,
    pub post_step: Option<PostStep<'a>>,
    pub trace: DecayTrace,
    pub n_damped_solves: usize,
    pub max_second_moment: f64,
    pub max_fourth_moment: f64,
}

pub(crate) struct InnerOutcome {
    pub consensus: ConsensusPoint,
    pub converged: bool,
}

impl<'a> Driver<'a> {
    pub fn new(problem: &'a Problem, config: &'a SolverConfig, seed: u64) -> Self {
        Self {
            problem,
            config,
            rng: RngStream::new(seed),
            weight_objective: &*problem.objective,
            forcing: &problem.constraints,
            post_step: None,
            trace: DecayTrace::default(),
            n_damped_solves: 0,
            max_second_moment: 0.0,
            max_fourth_moment: 0.0,
        }
    }

    pub fn initial_ensemble(&self) -> Result<Ensemble> {
        self.config.validate()?;
        if self.config.init_box.dim() != self.problem.dim {
            return Err(CcboError::Config(format!(
                "init_box has dimension {} but problem {:?} has dimension {}",
                self.config.init_box.dim(),
                self.problem.name,
                self.problem.dim
            )));
        }
        let mut e = init_ensemble(self.config, self.problem.dim, &self.rng)?;
        if let Some(hook) = self.post_step {
            hook(&mut e);
        }
        Ok(e)
    }

    fn consensus(&self, ensemble: &Ensemble) -> Result<ConsensusPoint> {
        let f = self.weight_objective;
        let energies = par::map_indexed(self.config.execution, ensemble.n(), |j| f(ensemble.particle(j)));
        consensus_from_energies(ensemble, &energies, self.config.alpha)
    }

    fn observe(&mut self, ensemble: &Ensemble, consensus: &ConsensusPoint, spread: f64) -> Result<()> {
        let n = ensemble.n() as f64;
        let (m2, m4) = ensemble.particles().fold((0.0, 0.0), |(a, b), p| {
            let s: f64 = p.iter().map(|x| x * x).sum();
            (a + s, b + s * s)
        });
        self.max_second_moment = self.max_second_moment.max(m2 / n);
        self.max_fourth_moment = self.max_fourth_moment.max(m4 / n);

        let stride = self.config.trace_stride as u64;
        if stride == 0 || ensemble.step % stride != 0 {
            return Ok(());
        }
        let problem = self.problem;
        let g_values = par::map_indexed(self.config.execution, ensemble.n(), |j| {
            problem.constraints.eval_g(ensemble.particle(j))
        });
        let g_hat = par::first_error(g_values)?.iter().sum::<f64>() / n;
        let v_hat = problem.known_minimizer.as_ref().map(|vstar| {
            ensemble
                .particles()
                .map(|p| p.iter().zip(vstar).map(|(x, s)| (x - s) * (x - s)).sum::<f64>())
                .sum::<f64>()
                / (2.0 * n)
        });
        self.trace.records.push(TraceRecord {
            step: ensemble.step,
            v_hat,
            g_hat,
            consensus_objective: problem.eval(&consensus.point),
            consensus_constraint: problem.constraints.abs_sum(&consensus.point)?,
            spread,
        });
        Ok(())
    }

    /// Steps until the spread criterion holds or `budget` steps were taken.
    pub fn inner_loop(&mut self, ensemble: &mut Ensemble, budget: usize) -> Result<InnerOutcome> {
        let mut taken = 0usize;
        loop {
            let consensus = self.consensus(ensemble)?;
            let s = spread(ensemble, &consensus);
            self.observe(ensemble, &consensus, s)?;
            if s <= self.config.eps_stop {
                return Ok(InnerOutcome { consensus, converged: true });
            }
            if taken >= budget {
                return Ok(InnerOutcome { consensus, converged: false });
            }
            let (mut next, report) = semi_implicit_step(ensemble, &consensus, self.forcing, self.config, &self.rng)?;
            if let Some(hook) = self.post_step {
                hook(&mut next);
            }
            self.n_damped_solves += report.n_damped_solves;
            *ensemble = next;
            taken += 1;
        }
    }

    fn scored(&self, point: &[f64]) -> Result<(f64, f64)> {
        Ok((self.problem.eval(point), self.problem.constraints.abs_sum(point)?))
    }

    /// Single pass: one inner loop capped at `max_steps`.
    pub fn run_single(mut self) -> Result<(RunRecord, DecayTrace)> {
        let mut ensemble = self.initial_ensemble()?;
        let out = self.inner_loop(&mut ensemble, self.config.max_steps)?;
        let (objective, constraint) = self.scored(&out.consensus.point)?;
        let record = RunRecord {
            seed: self.rng.run_seed(),
            converged: out.converged,
            stop_reason: if out.converged { StopReason::SpreadThreshold } else { StopReason::StepCap },
            steps_total: ensemble.step,
            final_consensus: out.consensus.point.clone(),
            final_objective: objective,
            final_constraint_value: constraint,
            best_consensus: out.consensus.point,
            best_objective: objective,
            best_constraint_value: constraint,
            restarts: 0,
            n_damped_solves: self.n_damped_solves,
            max_second_moment: self.max_second_moment,
            max_fourth_moment: self.max_fourth_moment,
        };
        Ok((record, self.trace))
    }

    /// Restart loop with independent noise kicks between inner loops.
    pub fn run_restarts(mut self) -> Result<(RunRecord, DecayTrace)> {
        let config = self.config;
        let mut ensemble = self.initial_ensemble()?;
        // `None` is the "larger than anything" sentinel for the best objective.
        let mut best: Option<(f64, Vec<f64>, f64)> = None;
        let mut restarts = 0usize;
        let (stop_reason, last) = loop {
            let used = ensemble.step as usize;
            let budget = config.max_steps.min(config.max_total_steps.saturating_sub(used));
            let out = self.inner_loop(&mut ensemble, budget)?;
            let (objective, constraint) = self.scored(&out.consensus.point)?;
            let gap = match &best {
                Some((b, _, _)) => (objective - b).abs(),
                None => f64::MAX,
            };
            if best.as_ref().map_or(true, |(b, _, _)| objective < *b) {
                best = Some((objective, out.consensus.point.clone(), constraint));
            }
            let last = (out.consensus.point, objective, constraint);
            if gap < config.eps_indep {
                break (StopReason::RestartThreshold, last);
            }
            if ensemble.step as usize >= config.max_total_steps {
                break (StopReason::StepCap, last);
            }
            ensemble = independent_noise_kick(&ensemble, config.sigma_indep, config.gamma, &self.rng);
            if let Some(hook) = self.post_step {
                hook(&mut ensemble);
            }
            restarts += 1;
        };
        let (best_objective, best_consensus, best_constraint_value) = best.expect("at least one inner loop ran");
        let record = RunRecord {
            seed: self.rng.run_seed(),
            converged: stop_reason == StopReason::RestartThreshold,
            stop_reason,
            steps_total: ensemble.step,
            final_consensus: last.0,
            final_objective: last.1,
            final_constraint_value: last.2,
            best_consensus,
            best_objective,
            best_constraint_value,
            restarts,
            n_damped_solves: self.n_damped_solves,
            max_second_moment: self.max_second_moment,
            max_fourth_moment: self.max_fourth_moment,
        };
        Ok((record, self.trace))
    }
}

fn with_context<T>(seed: u64, r: Result<T>) -> Result<T> {
    r.map_err(|e| CcboError::Run { seed, source: Box::new(e) })
}

/// Single-pass constrained solver: steps the semi-implicit scheme until the
/// ensemble spread is at most `eps_stop` or `max_steps` is reached.
pub fn run_algorithm1(problem: &Problem, config: &SolverConfig, seed: u64) -> Result<(RunRecord, DecayTrace)> {
    with_context(seed, Driver::new(problem, config, seed).run_single())
}

/// Restart variant: repeats the inner loop, kicking every particle with
/// independent noise in between, until two consecutive inner loops end
/// with consensus objectives closer than `eps_indep`. Reports the best
/// consensus seen.
pub fn run_algorithm2(problem: &Problem, config: &SolverConfig, seed: u64) -> Result<(RunRecord, DecayTrace)> {
    with_context(seed, Driver::new(problem, config, seed).run_restarts())
}
