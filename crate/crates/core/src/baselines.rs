//! Comparison methods: penalized CBO (constraint folded into the objective)
//! and projected CBO (particles renormalized onto a sphere after each step).

use crate::config::SolverConfig;
use crate::constraints::ConstraintSet;
use crate::ensemble::{resample_particle, Ensemble};
use crate::error::{CcboError, Result};
use crate::problem::Problem;
use crate::solver::{DecayTrace, Driver, RunRecord};

/// Unconstrained CBO on `E(v) + G(v)/epsilon`. Scoring still uses the
/// original objective and constraints.
pub fn run_penalized(problem: &Problem, config: &SolverConfig, seed: u64) -> Result<(RunRecord, DecayTrace)> {
    let inv_eps = 1.0 / config.epsilon;
    let constraints = &problem.constraints;
    let objective = &problem.objective;
    let penalized = move |v: &[f64]| {
        let g = constraints.eval_g(v).unwrap_or(f64::NAN);
        objective(v) + inv_eps * g
    };
    let none = ConstraintSet::empty(problem.dim);
    let mut driver = Driver::new(problem, config, seed);
    driver.weight_objective = &penalized;
    driver.forcing = &none;
    driver
        .run_single()
        .map_err(|e| CcboError::Run { seed, source: Box::new(e) })
}

/// Radius of the single full-support sphere constraint, if that is what
/// `problem` carries.
fn sphere_radius(problem: &Problem) -> Result<f64> {
    let cs = &problem.constraints;
    match cs.constraints() {
        [c] if cs.support_of(0).len() == problem.dim => c.sphere_radius().ok_or_else(|| {
            CcboError::UnsupportedBaseline(format!(
                "projected CBO needs a sphere constraint, {:?} has {:?}",
                problem.name,
                c.label()
            ))
        }),
        _ => Err(CcboError::UnsupportedBaseline(format!(
            "projected CBO needs exactly one sphere constraint on all coordinates ({:?})",
            problem.name
        ))),
    }
}

/// `r v / |v|`.
pub fn project_to_sphere(v: &mut [f64], radius: f64) -> bool {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return false;
    }
    let s = radius / norm;
    v.iter_mut().for_each(|x| *x *= s);
    true
}

/// CBO without forcing whose particles are renormalized onto the sphere
/// after every step. A particle at the origin is redrawn from the init box.
pub fn run_projected(problem: &Problem, config: &SolverConfig, seed: u64) -> Result<(RunRecord, DecayTrace)> {
    let radius = sphere_radius(problem)?;
    let none = ConstraintSet::empty(problem.dim);
    let mut driver = Driver::new(problem, config, seed);
    let rng = driver.rng;
    let project = move |e: &mut Ensemble| {
        let step = e.step;
        for j in 0..e.n() {
            let p = e.particle_mut(j);
            let mut attempt = 0;
            while !project_to_sphere(p, radius) {
                resample_particle(config, &rng, j, step.wrapping_add(attempt << 32), p);
                attempt += 1;
            }
        }
    };
    driver.forcing = &none;
    driver.post_step = Some(&project);
    driver
        .run_single()
        .map_err(|e| CcboError::Run { seed, source: Box::new(e) })
}
