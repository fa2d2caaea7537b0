//! One-step particle updates: the semi-implicit constrained step, an
//! explicit Euler-Maruyama reference step, and the restart kick.

use crate::config::SolverConfig;
use crate::consensus::ConsensusPoint;
use crate::constraints::ConstraintSet;
use crate::ensemble::Ensemble;
use crate::error::{CcboError, Result};
use crate::linalg::{solve_damped_info, Matrix};
use crate::par;
use crate::rng::{DrawKind, RngStream};

/// Diagnostics of a single step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepReport {
    /// `max_j |V^j_{k+1} - V^j_k|`.
    pub max_displacement: f64,
    /// Particles whose linear solve needed Levenberg damping.
    pub n_damped_solves: usize,
    /// Particles where at least one constraint term fell back to its
    /// Gauss-Newton part.
    pub n_gauss_newton_solves: usize,
    /// Some particle left the ball of radius `blowup_threshold` or went non-finite.
    pub blown_up: bool,
}

struct ParticleOutcome {
    displacement: f64,
    damped: bool,
    gauss_newton: bool,
    blown_up: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn combine(outcomes: Vec<ParticleOutcome>) -> StepReport {
    outcomes.into_iter().fold(StepReport::default(), |mut r, o| {
        r.max_displacement = r.max_displacement.max(o.displacement);
        r.n_damped_solves += usize::from(o.damped);
        r.n_gauss_newton_solves += usize::from(o.gauss_newton);
        r.blown_up |= o.blown_up;
        r
    })
}

/// Solves `[I + scale H] x = rhs` block by block and returns `x`.
fn solve_forcing_system(
    cs: &ConstraintSet,
    terms: &crate::constraints::ForcingTerms,
    scale: f64,
    rhs: &[f64],
) -> Result<(Vec<f64>, bool)> {
    let mut x = rhs.to_vec();
    let mut damped = false;
    for (b, block) in cs.blocks().iter().enumerate() {
        let h = cs.block_hessian(terms, b);
        if h.iter().all(|&v| v == 0.0) {
            continue;
        }
        let nb = block.len();
        let mut a = Matrix::from_row_major(nb, h.iter().map(|v| v * scale).collect());
        a.add_diagonal(1.0);
        let local_rhs: Vec<f64> = block.iter().map(|&c| rhs[c]).collect();
        let sol = solve_damped_info(&a, &local_rhs)?;
        damped |= sol.damping > 0.0;
        for (&c, v) in block.iter().zip(&sol.x) {
            x[c] = *v;
        }
    }
    Ok((x, damped))
}

/// Semi-implicit constrained step: every particle solves
/// `[I + (gamma/eps) hess G(V)] x = lambda gamma (V - v_a) + (gamma/eps) grad G(V)
///  + sigma sqrt(gamma) (V - v_a) * z` and moves to `V - x`. Hessian terms
/// come from [`ConstraintSet::stabilized_forcing_terms`].
pub fn semi_implicit_step(
    ensemble: &Ensemble,
    consensus: &ConsensusPoint,
    cs: &ConstraintSet,
    config: &SolverConfig,
    rng: &RngStream,
) -> Result<(Ensemble, StepReport)> {
    let dim = ensemble.dim();
    let step = ensemble.step;
    let stiff = config.gamma / config.epsilon;
    let drift = config.lambda * config.gamma;
    let noise = config.sigma * config.gamma.sqrt();
    let threshold = config.blowup_threshold;
    let va = &consensus.point;

    let mut next = ensemble.clone();
    let outcomes = par::map_rows_mut(config.execution, next.as_flat_mut(), dim, |j, row| {
        let mut z = vec![0.0; dim];
        rng.fill_normal(j, step, DrawKind::Diffusion, &mut z);
        let mut rhs: Vec<f64> = (0..dim)
            .map(|k| {
                let diff = row[k] - va[k];
                drift * diff + noise * diff * z[k]
            })
            .collect();
        let (x, damped, gauss_newton) = if cs.is_empty() {
            (rhs, false, false)
        } else {
            let terms = cs
                .stabilized_forcing_terms(row, stiff)
                .map_err(|e| CcboError::Step { particle: j, reason: e.to_string() })?;
            for (r, g) in rhs.iter_mut().zip(&terms.gradient) {
                *r += stiff * g;
            }
            let (x, damped) = solve_forcing_system(cs, &terms, stiff, &rhs)
                .map_err(|e| CcboError::Step { particle: j, reason: e.to_string() })?;
            (x, damped, terms.n_gauss_newton > 0)
        };
        for (v, dx) in row.iter_mut().zip(&x) {
            *v -= dx;
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(CcboError::Step { particle: j, reason: "non-finite update".into() });
        }
        Ok(ParticleOutcome { displacement: norm(&x), damped, gauss_newton, blown_up: norm(row) > threshold })
    });
    let outcomes = par::first_error(outcomes)?;
    next.step += 1;
    Ok((next, combine(outcomes)))
}

/// Explicit Euler-Maruyama step with the same noise draws as
/// [`semi_implicit_step`]. Blow-up is reported, never raised; non-finite
/// coordinates are replaced by `+-blowup_threshold`.
pub fn explicit_step(
    ensemble: &Ensemble,
    consensus: &ConsensusPoint,
    cs: &ConstraintSet,
    config: &SolverConfig,
    rng: &RngStream,
) -> (Ensemble, StepReport) {
    let dim = ensemble.dim();
    let step = ensemble.step;
    let stiff = config.gamma / config.epsilon;
    let drift = config.lambda * config.gamma;
    let noise = config.sigma * config.gamma.sqrt();
    let threshold = config.blowup_threshold;
    let va = &consensus.point;

    let mut next = ensemble.clone();
    let outcomes = par::map_rows_mut(config.execution, next.as_flat_mut(), dim, |j, row| {
        let mut z = vec![0.0; dim];
        rng.fill_normal(j, step, DrawKind::Diffusion, &mut z);
        let grad = if cs.is_empty() { Ok(vec![0.0; dim]) } else { cs.grad_g(row) };
        let mut blown_up = false;
        let mut displacement = 0.0;
        match grad {
            Ok(grad) => {
                for k in 0..dim {
                    let diff = row[k] - va[k];
                    let dx = drift * diff + stiff * grad[k] + noise * diff * z[k];
                    displacement += dx * dx;
                    row[k] -= dx;
                }
            }
            Err(_) => {
                row.iter_mut().for_each(|v| *v = f64::NAN);
                displacement = f64::INFINITY;
            }
        }
        for v in row.iter_mut() {
            if !v.is_finite() {
                blown_up = true;
                *v = if v.is_nan() { threshold } else { threshold.copysign(*v) };
            }
        }
        blown_up |= norm(row) > threshold;
        ParticleOutcome { displacement: displacement.sqrt(), damped: false, gauss_newton: false, blown_up }
    });
    next.step += 1;
    (next, combine(outcomes))
}

/// Restart kick: `V^j <- V^j + sigma_indep sqrt(gamma) z` with fresh normals.
pub fn independent_noise_kick(ensemble: &Ensemble, sigma_indep: f64, gamma: f64, rng: &RngStream) -> Ensemble {
    let mut next = ensemble.clone();
    if sigma_indep == 0.0 {
        return next;
    }
    let dim = ensemble.dim();
    let scale = sigma_indep * gamma.sqrt();
    let mut z = vec![0.0; dim];
    for j in 0..ensemble.n() {
        rng.fill_normal(j, ensemble.step, DrawKind::IndependentKick, &mut z);
        for (v, zk) in next.particle_mut(j).iter_mut().zip(&z) {
            *v += scale * zk;
        }
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Execution;
    use crate::consensus::compute_consensus;
    use crate::constraints::Constraint;

    fn scalar_setup(gamma_over_eps: f64) -> (Ensemble, ConsensusPoint, ConstraintSet, SolverConfig) {
        let e = Ensemble::from_rows(&[vec![1.5], vec![-0.7]]).unwrap();
        let c = ConsensusPoint { point: vec![0.0], min_energy: 0.0, effective_weight_mass: 1.0 };
        let cs = ConstraintSet::new(1, vec![Constraint::linear(vec![1.0], 0.0)]).unwrap();
        let mut cfg = SolverConfig::new(1);
        cfg.lambda = 0.0;
        cfg.sigma = 0.0;
        cfg.gamma = 0.1;
        cfg.epsilon = cfg.gamma / gamma_over_eps;
        (e, c, cs, cfg)
    }

    #[test]
    fn scalar_semi_implicit_contracts() {
        for ratio in [0.1, 1.0, 10.0, 1e4] {
            let (e, c, cs, cfg) = scalar_setup(ratio);
            let (next, rep) = semi_implicit_step(&e, &c, &cs, &cfg, &RngStream::new(1)).unwrap();
            for j in 0..2 {
                let expect = e.particle(j)[0] / (1.0 + 2.0 * ratio);
                assert!((next.particle(j)[0] - expect).abs() < 1e-14 * (1.0 + expect.abs()));
            }
            assert!(!rep.blown_up);
            assert_eq!(next.step, 1);
        }
    }

    #[test]
    fn sphere_centre_does_not_attract() {
        let cs = ConstraintSet::new(3, vec![Constraint::sphere(1.0)]).unwrap();
        let mut cfg = SolverConfig::new(3);
        cfg.lambda = 0.0;
        cfg.sigma = 0.0;
        let e = Ensemble::from_rows(&[vec![0.05, 0.0, 0.0], vec![1.2, 0.0, 0.0]]).unwrap();
        let c = ConsensusPoint { point: vec![0.0; 3], min_energy: 0.0, effective_weight_mass: 1.0 };
        assert_eq!(cs.stabilized_forcing_terms(e.particle(0), 10.0).unwrap().n_gauss_newton, 1);
        assert_eq!(cs.stabilized_forcing_terms(e.particle(1), 10.0).unwrap().n_gauss_newton, 0);
        let mut ens = e;
        for _ in 0..50 {
            let (next, rep) = semi_implicit_step(&ens, &c, &cs, &cfg, &RngStream::new(1)).unwrap();
            assert!(rep.n_gauss_newton_solves <= 1);
            ens = next;
        }
        for j in 0..2 {
            let r: f64 = ens.particle(j).iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((r - 1.0).abs() < 1e-8, "particle {j} ended at radius {r}");
        }
    }

    #[test]
    fn scalar_explicit_recursion() {
        let (mut e, c, cs, cfg) = scalar_setup(10.0);
        let v0 = e.particle(0)[0];
        for k in 1..=5 {
            e = explicit_step(&e, &c, &cs, &cfg, &RngStream::new(1)).0;
            let expect = (-19f64).powi(k) * v0;
            assert!((e.particle(0)[0] - expect).abs() < 1e-9 * expect.abs());
        }
        let (mut e, c, cs, cfg) = scalar_setup(0.1);
        for _ in 0..3 {
            e = explicit_step(&e, &c, &cs, &cfg, &RngStream::new(1)).0;
        }
        assert!((e.particle(0)[0] - 0.8f64.powi(3) * 1.5).abs() < 1e-14);
    }

    #[test]
    fn explicit_blowup_is_flagged_and_sanitized() {
        let (mut e, c, cs, cfg) = scalar_setup(10.0);
        let mut flagged = false;
        for _ in 0..20 {
            let (next, rep) = explicit_step(&e, &c, &cs, &cfg, &RngStream::new(1));
            flagged |= rep.blown_up;
            assert!(next.is_finite());
            e = next;
        }
        assert!(flagged);
    }

    #[test]
    fn unconstrained_noiseless_is_pure_drift() {
        let e = Ensemble::from_rows(&[vec![1.0, 2.0], vec![-1.0, 0.5], vec![3.0, -2.0]]).unwrap();
        let c = compute_consensus(&e, |v| v[0] * v[0] + v[1] * v[1], 1.0).unwrap();
        let cs = ConstraintSet::empty(2);
        let mut cfg = SolverConfig::new(2);
        cfg.sigma = 0.0;
        let rng = RngStream::new(3);
        let (a, _) = semi_implicit_step(&e, &c, &cs, &cfg, &rng).unwrap();
        let (b, _) = explicit_step(&e, &c, &cs, &cfg, &rng);
        assert_eq!(a, b);
        for j in 0..3 {
            for k in 0..2 {
                let v = e.particle(j)[k];
                let expect = v - cfg.lambda * cfg.gamma * (v - c.point[k]);
                assert!((a.particle(j)[k] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn noisy_unconstrained_steps_agree_across_schemes() {
        let e = Ensemble::from_rows(&[vec![1.0, 2.0], vec![-1.0, 0.5]]).unwrap();
        let c = compute_consensus(&e, |v| v[0], 1.0).unwrap();
        let cfg = SolverConfig::new(2);
        let rng = RngStream::new(8);
        let (a, _) = semi_implicit_step(&e, &c, &ConstraintSet::empty(2), &cfg, &rng).unwrap();
        let (b, _) = explicit_step(&e, &c, &ConstraintSet::empty(2), &cfg, &rng);
        assert_eq!(a, b);
    }

    #[test]
    fn kick_zero_is_identity_and_replays() {
        let e = Ensemble::from_rows(&[vec![1.0, 2.0], vec![-1.0, 0.5]]).unwrap();
        let rng = RngStream::new(11);
        assert_eq!(independent_noise_kick(&e, 0.0, 0.1, &rng), e);
        let a = independent_noise_kick(&e, 0.3, 0.1, &rng);
        let b = independent_noise_kick(&e, 0.3, 0.1, &rng);
        assert_eq!(a, b);
        assert_ne!(a, e);
    }

    #[test]
    fn kick_moments() {
        let n = 10_000;
        let e = Ensemble::from_flat(vec![0.0; n], n, 1).unwrap();
        let k = independent_noise_kick(&e, 1.0, 1.0, &RngStream::new(5));
        let mean = k.as_flat().iter().sum::<f64>() / n as f64;
        let var = k.as_flat().iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn execution_paths_match() {
        let rows: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64 * 0.1 - 0.8, 1.0 - i as f64 * 0.05, 0.3]).collect();
        let e = Ensemble::from_rows(&rows).unwrap();
        let cs = ConstraintSet::new(3, vec![Constraint::sphere(1.0)]).unwrap();
        let c = compute_consensus(&e, |v| v[0] + v[1], 50.0).unwrap();
        let mut cfg = SolverConfig::new(3);
        cfg.execution = Execution::Sequential;
        let rng = RngStream::new(17);
        let (a, ra) = semi_implicit_step(&e, &c, &cs, &cfg, &rng).unwrap();
        cfg.execution = Execution::Parallel;
        let (b, rb) = semi_implicit_step(&e, &c, &cs, &cfg, &rng).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
    }
}
