use std::fmt;
use std::sync::Arc;

use crate::constraints::ConstraintSet;
use crate::error::{CcboError, Result};

/// Scalar objective `E: R^d -> R`.
pub type Objective = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// An objective with its equality constraints and, when known, the answer.
#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub objective: Objective,
    pub constraints: ConstraintSet,
    pub dim: usize,
    pub known_minimizer: Option<Vec<f64>>,
    pub known_minimum: Option<f64>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("constraints", &self.constraints.len())
            .field("known_minimizer", &self.known_minimizer)
            .field("known_minimum", &self.known_minimum)
            .finish()
    }
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        objective: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        constraints: ConstraintSet,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(CcboError::Config("problem dimension must be >= 1".into()));
        }
        if constraints.dim() != dim {
            return Err(CcboError::Config(format!(
                "constraint set has dimension {} but the problem has dimension {dim}",
                constraints.dim()
            )));
        }
        Ok(Self {
            name: name.into(),
            objective: Arc::new(objective),
            constraints,
            dim,
            known_minimizer: None,
            known_minimum: None,
        })
    }

    /// Registers the known minimizer; the known minimum is filled in from it
    /// unless already set, in which case the two must agree to 1e-9.
    pub fn with_minimizer(mut self, vstar: Vec<f64>) -> Result<Self> {
        if vstar.len() != self.dim {
            return Err(CcboError::Config(format!(
                "known minimizer has length {} but the problem has dimension {}",
                vstar.len(),
                self.dim
            )));
        }
        let value = (self.objective)(&vstar);
        match self.known_minimum {
            Some(m) if (m - value).abs() > 1e-9 => {
                return Err(CcboError::Config(format!(
                    "known minimum {m} disagrees with objective at known minimizer ({value})"
                )));
            }
            Some(_) => {}
            None => self.known_minimum = Some(value),
        }
        self.known_minimizer = Some(vstar);
        Ok(self)
    }

    pub fn with_minimum(mut self, minimum: f64) -> Result<Self> {
        if let Some(v) = &self.known_minimizer {
            let value = (self.objective)(v);
            if (minimum - value).abs() > 1e-9 {
                return Err(CcboError::Config(format!(
                    "known minimum {minimum} disagrees with objective at known minimizer ({value})"
                )));
            }
        }
        self.known_minimum = Some(minimum);
        Ok(self)
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        (self.objective)(v)
    }
}
