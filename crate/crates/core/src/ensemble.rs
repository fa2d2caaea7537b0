use rand::Rng;

use crate::config::SolverConfig;
use crate::error::{CcboError, Result};
use crate::rng::{DrawKind, RngStream};

/// Particle positions (row-major, one row per particle) plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    positions: Vec<f64>,
    n: usize,
    dim: usize,
    pub step: u64,
}

impl Ensemble {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let dim = rows.first().map_or(0, Vec::len);
        if n == 0 || dim == 0 {
            return Err(CcboError::Config("ensemble needs at least one particle and one dimension".into()));
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(CcboError::Config("ensemble rows have unequal lengths".into()));
        }
        Self::from_flat(rows.concat(), n, dim)
    }

    pub fn from_flat(positions: Vec<f64>, n: usize, dim: usize) -> Result<Self> {
        if n == 0 || dim == 0 || positions.len() != n * dim {
            return Err(CcboError::Config(format!(
                "ensemble of {} values cannot be shaped {n}x{dim}",
                positions.len()
            )));
        }
        Ok(Self { positions, n, dim, step: 0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn particle(&self, j: usize) -> &[f64] {
        &self.positions[j * self.dim..(j + 1) * self.dim]
    }

    pub fn particle_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.positions[j * self.dim..(j + 1) * self.dim]
    }

    pub fn particles(&self) -> std::slice::ChunksExact<'_, f64> {
        self.positions.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.positions
    }

    pub fn as_flat_mut(&mut self) -> &mut [f64] {
        &mut self.positions
    }

    pub fn is_finite(&self) -> bool {
        self.positions.iter().all(|x| x.is_finite())
    }

    /// Largest Euclidean norm of any particle.
    pub fn max_norm(&self) -> f64 {
        self.particles()
            .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// Draws `config.n_particles` particles uniformly from `config.init_box`.
pub fn init_ensemble(config: &SolverConfig, dim: usize, rng: &RngStream) -> Result<Ensemble> {
    config.init_box.validate(dim)?;
    if config.n_particles == 0 {
        return Err(CcboError::Config("n_particles must be >= 1".into()));
    }
    let bounds = &config.init_box;
    let mut positions = Vec::with_capacity(config.n_particles * dim);
    for j in 0..config.n_particles {
        let mut r = rng.substream(j, 0, DrawKind::Init);
        for (lo, hi) in bounds.lower.iter().zip(&bounds.upper) {
            positions.push(r.random_range(*lo..*hi));
        }
    }
    Ensemble::from_flat(positions, config.n_particles, dim)
}

/// Redraws a single particle from the init box (used by the projected baseline).
pub(crate) fn resample_particle(config: &SolverConfig, rng: &RngStream, particle: usize, step: u64, out: &mut [f64]) {
    let mut r = rng.substream(particle, step, DrawKind::Resample);
    for ((x, lo), hi) in out.iter_mut().zip(&config.init_box.lower).zip(&config.init_box.upper) {
        *x = r.random_range(*lo..*hi);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::InitBox;

    #[test]
    fn uniform_box() {
        let mut c = SolverConfig::new(2);
        c.n_particles = 50;
        let e = init_ensemble(&c, 2, &RngStream::new(1)).unwrap();
        assert_eq!((e.n(), e.dim(), e.step), (50, 2, 0));
        assert!(e.as_flat().iter().all(|x| (-3.0..=3.0).contains(x)));
    }

    #[test]
    fn degenerate_box_rejected() {
        let mut c = SolverConfig::new(1);
        c.init_box = InitBox::cube(1, 0.0, 0.0);
        assert!(matches!(init_ensemble(&c, 1, &RngStream::new(1)), Err(CcboError::Config(_))));
        let c = SolverConfig::new(3);
        assert!(init_ensemble(&c, 2, &RngStream::new(1)).is_err());
    }

    #[test]
    fn seeded_init_is_bit_identical() {
        let c = SolverConfig::new(3);
        let a = init_ensemble(&c, 3, &RngStream::new(42)).unwrap();
        let b = init_ensemble(&c, 3, &RngStream::new(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coarse_uniformity() {
        let mut c = SolverConfig::new(3);
        c.n_particles = 4000;
        c.init_box = InitBox { lower: vec![-3.0, 0.0, 10.0], upper: vec![3.0, 1.0, 14.0] };
        let e = init_ensemble(&c, 3, &RngStream::new(9)).unwrap();
        for k in 0..3 {
            let (lo, hi) = (c.init_box.lower[k], c.init_box.upper[k]);
            let mean = e.particles().map(|p| p[k]).sum::<f64>() / e.n() as f64;
            let se = (hi - lo) / 12f64.sqrt() / (e.n() as f64).sqrt();
            assert!((mean - 0.5 * (lo + hi)).abs() < 5.0 * se, "coordinate {k}: mean {mean}");
        }
    }
}
