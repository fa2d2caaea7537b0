//! Gibbs-weighted consensus point.

use crate::ensemble::Ensemble;
use crate::error::{CcboError, Result};

/// Weighted average `v_alpha` and the quantities used to stabilize it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusPoint {
    pub point: Vec<f64>,
    /// `min_j E(V^j)`, the shift applied before exponentiation.
    pub min_energy: f64,
    /// `sum_j exp(-alpha (E(V^j) - min_energy))`, always in `[1, N]`.
    pub effective_weight_mass: f64,
}

fn check_energies(energies: &[f64]) -> Result<()> {
    match energies.iter().position(|e| !e.is_finite()) {
        Some(particle) => Err(CcboError::ObjectiveEvaluation { particle }),
        None => Ok(()),
    }
}

/// Consensus point from precomputed per-particle energies.
///
/// Weights are `exp(-alpha (E_j - E_min))`; the sum runs sequentially in
/// index order so the result does not depend on scheduling.
pub fn consensus_from_energies(ensemble: &Ensemble, energies: &[f64], alpha: f64) -> Result<ConsensusPoint> {
    debug_assert_eq!(energies.len(), ensemble.n());
    check_energies(energies)?;
    let min_energy = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let mut point = vec![0.0; ensemble.dim()];
    let mut mass = 0.0;
    for (p, &e) in ensemble.particles().zip(energies) {
        let w = (-alpha * (e - min_energy)).exp();
        mass += w;
        for (acc, x) in point.iter_mut().zip(p) {
            *acc += w * x;
        }
    }
    for acc in &mut point {
        *acc /= mass;
    }
    Ok(ConsensusPoint { point, min_energy, effective_weight_mass: mass })
}

/// Evaluates `objective` on every particle and returns the consensus point.
pub fn compute_consensus<F>(ensemble: &Ensemble, objective: F, alpha: f64) -> Result<ConsensusPoint>
where
    F: Fn(&[f64]) -> f64,
{
    let energies: Vec<f64> = ensemble.particles().map(&objective).collect();
    consensus_from_energies(ensemble, &energies, alpha)
}

/// First index attaining the smallest energy.
pub fn argmin_index(energies: &[f64]) -> Result<usize> {
    check_energies(energies)?;
    let mut best = 0;
    for (i, &e) in energies.iter().enumerate().skip(1) {
        if e < energies[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Best particle by objective value, ties broken by lowest index.
pub fn argmin_particle<F>(ensemble: &Ensemble, objective: F) -> Result<(usize, Vec<f64>)>
where
    F: Fn(&[f64]) -> f64,
{
    let energies: Vec<f64> = ensemble.particles().map(&objective).collect();
    let i = argmin_index(&energies)?;
    Ok((i, ensemble.particle(i).to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ens(rows: &[&[f64]]) -> Ensemble {
        Ensemble::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn single_particle() {
        let e = ens(&[&[1.0, 2.0]]);
        for alpha in [1e-3, 1.0, 1e6] {
            let c = compute_consensus(&e, |v| v[0] * 7.0, alpha).unwrap();
            assert_eq!(c.point, vec![1.0, 2.0]);
            assert_eq!(c.effective_weight_mass, 1.0);
        }
    }

    #[test]
    fn symmetric_pair() {
        let e = ens(&[&[0.0, 0.0], &[2.0, 0.0]]);
        let c = compute_consensus(&e, |_| 3.0, 17.0).unwrap();
        assert_eq!(c.point, vec![1.0, 0.0]);
    }

    #[test]
    fn gibbs_weights_by_hand() {
        // weights 1 and exp(-ln 9) = 1/9 -> (1/9)/(10/9) = 0.1
        let e = ens(&[&[0.0], &[1.0]]);
        let c = compute_consensus(&e, |v| v[0], 9f64.ln()).unwrap();
        assert!((c.point[0] - 0.1).abs() < 1e-15);
        assert!((c.effective_weight_mass - 10.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_energy_names_particle() {
        let e = ens(&[&[0.0], &[1.0], &[2.0]]);
        let err = compute_consensus(&e, |v| if v[0] == 1.0 { f64::NAN } else { 0.0 }, 1.0).unwrap_err();
        assert_eq!(err, CcboError::ObjectiveEvaluation { particle: 1 });
    }

    #[test]
    fn argmin_ties_to_lowest() {
        assert_eq!(argmin_index(&[3.0, 1.0, 2.0]).unwrap(), 1);
        assert_eq!(argmin_index(&[1.0, 1.0, 2.0]).unwrap(), 0);
        assert!(argmin_index(&[1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn large_alpha_does_not_overflow() {
        let e = ens(&[&[0.0], &[1.0], &[2.0]]);
        let c = compute_consensus(&e, |v| 1e3 + v[0] * 1e3, 1e6).unwrap();
        assert!(c.point[0].is_finite());
        assert_eq!(c.point[0], 0.0);
    }
}
