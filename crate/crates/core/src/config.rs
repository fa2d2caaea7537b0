use crate::error::{CcboError, Result};

/// How per-particle work is scheduled inside a step.
///
/// `Parallel` uses rayon when the `parallel` feature is enabled and falls
/// back to the sequential path otherwise. Both produce identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// Axis-aligned box used to draw the initial ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct InitBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl InitBox {
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self { lower: vec![lo; dim], upper: vec![hi; dim] }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.lower.len() != self.upper.len() {
            return Err(CcboError::Config(format!(
                "init_box bounds have lengths {} and {}",
                self.lower.len(),
                self.upper.len()
            )));
        }
        if self.lower.len() != dim {
            return Err(CcboError::Config(format!(
                "init_box has dimension {} but the problem has dimension {dim}",
                self.lower.len()
            )));
        }
        for (i, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(CcboError::Config(format!(
                    "init_box coordinate {i} has empty or invalid interval [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

/// Every scalar that drives a solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Drift strength toward the consensus point.
    pub lambda: f64,
    /// Anisotropic diffusion strength.
    pub sigma: f64,
    /// Gibbs weight exponent.
    pub alpha: f64,
    /// Constraint forcing scale; the forcing term is `(1/epsilon) grad G`.
    pub epsilon: f64,
    /// Time step.
    pub gamma: f64,
    pub n_particles: usize,
    /// Inner stopping threshold on `(1/dN) sum |V^j - v_alpha|^2`.
    pub eps_stop: f64,
    /// Step cap for a single inner loop.
    pub max_steps: usize,
    /// Step cap across all inner loops of the restart algorithm.
    pub max_total_steps: usize,
    /// Restart kick magnitude.
    pub sigma_indep: f64,
    /// Restart convergence threshold on the consensus objective.
    pub eps_indep: f64,
    pub init_box: InitBox,
    /// Particle norm above which a step reports a blow-up.
    pub blowup_threshold: f64,
    /// Record every `trace_stride`-th step; 0 disables tracing.
    pub trace_stride: usize,
    pub execution: Execution,
}

/// Names accepted by [`SolverConfig::set`].
pub const SCALAR_PARAMS: &[&str] = &[
    "lambda",
    "sigma",
    "alpha",
    "epsilon",
    "gamma",
    "n_particles",
    "eps_stop",
    "max_steps",
    "max_total_steps",
    "sigma_indep",
    "eps_indep",
    "blowup_threshold",
    "trace_stride",
];

impl SolverConfig {
    /// Defaults used by the quadratic benchmarks on a `dim`-dimensional box `[-3, 3]^dim`.
    pub fn new(dim: usize) -> Self {
        Self {
            lambda: 1.0,
            sigma: 5.0,
            alpha: 50.0,
            epsilon: 0.01,
            gamma: 0.1,
            n_particles: 50,
            eps_stop: 1e-14,
            max_steps: 10_000,
            max_total_steps: 100_000,
            sigma_indep: 0.0,
            eps_indep: f64::INFINITY,
            init_box: InitBox::cube(dim, -3.0, 3.0),
            blowup_threshold: 1e9,
            trace_stride: 1,
            execution: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda", self.lambda),
            ("gamma", self.gamma),
            ("epsilon", self.epsilon),
            ("alpha", self.alpha),
            ("blowup_threshold", self.blowup_threshold),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || value.is_nan() {
                return Err(CcboError::Config(format!("{name} must be > 0, got {value}")));
            }
        }
        for (name, value) in [("sigma", self.sigma), ("sigma_indep", self.sigma_indep)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(CcboError::Config(format!("{name} must be >= 0, got {value}")));
            }
        }
        if !(self.eps_stop >= 0.0) {
            return Err(CcboError::Config(format!("eps_stop must be >= 0, got {}", self.eps_stop)));
        }
        if !(self.eps_indep >= 0.0) {
            return Err(CcboError::Config(format!("eps_indep must be >= 0, got {}", self.eps_indep)));
        }
        if self.n_particles == 0 {
            return Err(CcboError::Config("n_particles must be >= 1".into()));
        }
        if self.max_steps == 0 || self.max_total_steps == 0 {
            return Err(CcboError::Config("step caps must be >= 1".into()));
        }
        Ok(())
    }

    /// Sets one scalar parameter by name from its textual value.
    pub fn set(&mut self, name: &str, value: &str) -> Result<()> {
        let float = || -> Result<f64> {
            let v = value.trim();
            match v {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                _ => v
                    .parse::<f64>()
                    .map_err(|_| CcboError::Config(format!("{name}: cannot parse {value:?} as a number"))),
            }
        };
        let count = || -> Result<usize> {
            let v = float()?;
            if v >= 0.0 && v.fract() == 0.0 && v <= usize::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(CcboError::Config(format!("{name}: expected a non-negative integer, got {value:?}")))
            }
        };
        match name {
            "lambda" => self.lambda = float()?,
            "sigma" => self.sigma = float()?,
            "alpha" => self.alpha = float()?,
            "epsilon" => self.epsilon = float()?,
            "gamma" => self.gamma = float()?,
            "n_particles" => self.n_particles = count()?,
            "eps_stop" => self.eps_stop = float()?,
            "max_steps" => self.max_steps = count()?,
            "max_total_steps" => self.max_total_steps = count()?,
            "sigma_indep" => self.sigma_indep = float()?,
            "eps_indep" => self.eps_indep = float()?,
            "blowup_threshold" => self.blowup_threshold = float()?,
            "trace_stride" => self.trace_stride = count()?,
            "init_box" => {
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                let [lo, hi] = parts[..] else {
                    return Err(CcboError::Config(format!("init_box: expected \"lo,hi\", got {value:?}")));
                };
                let parse = |s: &str| {
                    s.parse::<f64>()
                        .map_err(|_| CcboError::Config(format!("init_box: cannot parse {s:?}")))
                };
                self.init_box = InitBox::cube(self.init_box.dim(), parse(lo)?, parse(hi)?);
            }
            "execution" => {
                self.execution = match value.trim() {
                    "sequential" => Execution::Sequential,
                    "parallel" => Execution::Parallel,
                    _ => return Err(CcboError::Config(format!("execution: expected sequential or parallel, got {value:?}"))),
                }
            }
            _ => return Err(CcboError::Config(format!("unknown parameter {name:?}"))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_by_name() {
        let mut c = SolverConfig::new(2);
        c.set("alpha", "30").unwrap();
        c.set("eps_indep", "inf").unwrap();
        c.set("n_particles", "100").unwrap();
        c.set("init_box", "-1, 1").unwrap();
        assert_eq!(c.alpha, 30.0);
        assert!(c.eps_indep.is_infinite());
        assert_eq!(c.n_particles, 100);
        assert_eq!(c.init_box, InitBox::cube(2, -1.0, 1.0));
        assert!(c.set("n_particles", "2.5").is_err());
        assert!(c.set("bogus", "1").is_err());
    }

    #[test]
    fn validation() {
        let mut c = SolverConfig::new(2);
        assert!(c.validate().is_ok());
        c.gamma = 0.0;
        assert!(c.validate().is_err());
        let mut c = SolverConfig::new(2);
        c.n_particles = 0;
        assert!(c.validate().is_err());
        assert!(InitBox::cube(2, 0.0, 0.0).validate(2).is_err());
        assert!(InitBox::cube(3, -1.0, 1.0).validate(2).is_err());
    }
}
