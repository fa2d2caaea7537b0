//! Benchmark problems bundled with their hyperparameters and success rules.

mod ackley;
mod quadratic;
mod thomson;

pub use ackley::{make_ackley, make_ackley_comparison, paraboloid_constraint, Ackley, ComparisonCase};
pub use quadratic::{ellipse_constraint, make_quadratic, QuadraticConstraint};
pub use thomson::{
    bundled_references, make_thomson, parse_reference_table, reference_energy, thomson_energy, ReferenceEnergy,
};

use crate::baselines::{run_penalized, run_projected};
use crate::config::SolverConfig;
use crate::error::{CcboError, Result};
use crate::problem::Problem;
use crate::solver::{run_algorithm1, run_algorithm2, DecayTrace, RunRecord};

/// Which loop drives an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Algorithm1,
    Algorithm2,
    Penalized,
    Projected,
}

impl Algorithm {
    pub fn run(self, problem: &Problem, config: &SolverConfig, seed: u64) -> Result<(RunRecord, DecayTrace)> {
        match self {
            Self::Algorithm1 => run_algorithm1(problem, config, seed),
            Self::Algorithm2 => run_algorithm2(problem, config, seed),
            Self::Penalized => run_penalized(problem, config, seed),
            Self::Projected => run_projected(problem, config, seed),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Algorithm1 => "constrained",
            Self::Algorithm2 => "constrained-restarts",
            Self::Penalized => "penalized",
            Self::Projected => "projected",
        }
    }
}

/// Predicate deciding whether a run found the constrained minimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SuccessRule {
    /// `max_k |v_k - v*_k| <= tol`.
    InfNorm { tol: f64 },
    /// Relative energy error `<= rel_tol` and `sum_i |g_i| <= constraint_tol`.
    Thomson { rel_tol: f64, constraint_tol: f64 },
}

impl SuccessRule {
    /// Applies the rule to a run's output point, objective and constraint value.
    pub fn evaluate(&self, problem: &Problem, point: &[f64], objective: f64, constraint_value: f64) -> bool {
        match *self {
            SuccessRule::InfNorm { tol } => problem.known_minimizer.as_ref().is_some_and(|vstar| {
                point.iter().zip(vstar).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) <= tol
            }),
            SuccessRule::Thomson { rel_tol, constraint_tol } => problem.known_minimum.is_some_and(|m| {
                m != 0.0 && ((objective - m) / m).abs() <= rel_tol && constraint_value <= constraint_tol
            }),
        }
    }

    pub fn evaluate_record(&self, problem: &Problem, record: &RunRecord) -> bool {
        self.evaluate(problem, record.output_point(), record.best_objective, record.best_constraint_value)
    }
}

/// A problem with the hyperparameters and scoring it is run with.
#[derive(Debug, Clone)]
pub struct NamedExperiment {
    pub name: String,
    pub problem: Problem,
    pub config: SolverConfig,
    pub algorithm: Algorithm,
    pub success_rule: SuccessRule,
    pub n_runs: usize,
}

impl NamedExperiment {
    pub fn run(&self, seed: u64) -> Result<(RunRecord, DecayTrace)> {
        self.algorithm.run(&self.problem, &self.config, seed)
    }
}

/// Names accepted by [`experiment`]; `thomson-k<k>` works for any `k >= 2`.
pub fn list_experiments() -> Vec<String> {
    let mut names: Vec<String> =
        ["quadratic-segment", "quadratic-ellipse", "quadratic-line"].iter().map(|s| s.to_string()).collect();
    for (d, c) in [(3, 1), (3, 3), (3, 4), (3, 5), (20, 2), (20, 3), (20, 4)] {
        names.push(format!("ackley-d{d}-case{c}"));
    }
    for case in [ComparisonCase::A, ComparisonCase::B, ComparisonCase::C] {
        for e in make_ackley_comparison(case).expect("comparison cases are valid") {
            names.push(e.name);
        }
    }
    for k in [2, 3, 8, 15, 56, 470] {
        names.push(format!("thomson-k{k}"));
    }
    names
}

/// Looks up an experiment by name.
pub fn experiment(name: &str) -> Result<NamedExperiment> {
    let unknown = || CcboError::Config(format!("unknown experiment {name:?}"));
    match name {
        "quadratic-segment" => return make_quadratic(QuadraticConstraint::Segment),
        "quadratic-ellipse" => return make_quadratic(QuadraticConstraint::Ellipse),
        "quadratic-line" => return make_quadratic(QuadraticConstraint::Line),
        _ => {}
    }
    if let Some(k) = name.strip_prefix("thomson-k") {
        return make_thomson(k.parse().map_err(|_| unknown())?);
    }
    if let Some(rest) = name.strip_prefix("ackley-case-") {
        let letter = rest.get(..1).and_then(ComparisonCase::parse).ok_or_else(unknown)?;
        return make_ackley_comparison(letter)?.into_iter().find(|e| e.name == name).ok_or_else(unknown);
    }
    if let Some(rest) = name.strip_prefix("ackley-d") {
        let (d, c) = rest.split_once("-case").ok_or_else(unknown)?;
        return make_ackley(d.parse().map_err(|_| unknown())?, c.parse().map_err(|_| unknown())?);
    }
    Err(unknown())
}
