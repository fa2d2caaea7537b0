use std::collections::BTreeMap;

use crate::config::{InitBox, SolverConfig};
use crate::constraints::{Constraint, ConstraintSet};
use crate::error::{CcboError, Result};
use crate::problem::Problem;

use super::{Algorithm, NamedExperiment, SuccessRule};

const REFERENCE_TABLE: &str = include_str!("../../data/thomson_reference.csv");

/// Reference minimum energy with where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceEnergy {
    pub k: usize,
    pub energy: f64,
    pub provenance: String,
}

/// Parses the `k, energy, provenance` table; `#` starts a comment line.
pub fn parse_reference_table(text: &str) -> Result<BTreeMap<usize, ReferenceEnergy>> {
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(3, ',').map(str::trim);
        let bad = || CcboError::Config(format!("reference table line {}: {line:?}", lineno + 1));
        let k: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let energy: f64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let provenance = parts.next().unwrap_or("").to_string();
        if !(energy.is_finite() && energy > 0.0) {
            return Err(bad());
        }
        out.insert(k, ReferenceEnergy { k, energy, provenance });
    }
    Ok(out)
}

/// Reference energies bundled with the crate.
pub fn bundled_references() -> BTreeMap<usize, ReferenceEnergy> {
    parse_reference_table(REFERENCE_TABLE).expect("bundled Thomson reference table is well-formed")
}

/// Normalized minimum energy `(1/k) sum_{i<j} 1/|v_i - v_j|` for `k` electrons:
/// closed form for k = 2 (antipodal) and 3 (equilateral triangle on a great
/// circle), the bundled table otherwise.
pub fn reference_energy(k: usize) -> Option<f64> {
    match k {
        2 => Some(0.25),
        3 => Some(1.0 / 3f64.sqrt()),
        _ => bundled_references().get(&k).map(|r| r.energy),
    }
}

/// `(1/k) sum_{i<j} 1/|v_i - v_j|` over electrons stored as consecutive 3-vectors.
pub fn thomson_energy(v: &[f64]) -> f64 {
    let k = v.len() / 3;
    let mut total = 0.0;
    for i in 0..k {
        let (xi, yi, zi) = (v[3 * i], v[3 * i + 1], v[3 * i + 2]);
        for j in i + 1..k {
            let dx = xi - v[3 * j];
            let dy = yi - v[3 * j + 1];
            let dz = zi - v[3 * j + 2];
            total += 1.0 / (dx * dx + dy * dy + dz * dz).sqrt();
        }
    }
    total / k as f64
}

pub fn make_thomson(k: usize) -> Result<NamedExperiment> {
    if k < 2 {
        return Err(CcboError::Config(format!("Thomson problem needs k >= 2 electrons, got {k}")));
    }
    let dim = 3 * k;
    let constraints = (0..k)
        .map(|i| Constraint::sphere(1.0).with_support(vec![3 * i, 3 * i + 1, 3 * i + 2]))
        .collect();
    let name = format!("thomson-k{k}");
    let mut problem = Problem::new(&name, dim, thomson_energy, ConstraintSet::new(dim, constraints)?)?;
    if let Some(e) = reference_energy(k) {
        problem = problem.with_minimum(e)?;
    }
    let mut config = SolverConfig::new(dim);
    config.n_particles = 50;
    config.alpha = 50.0;
    config.epsilon = 0.01;
    config.lambda = 1.0;
    config.sigma = 1.0;
    config.gamma = 0.1;
    config.eps_indep = 1e-14;
    config.eps_stop = 1e-14;
    config.sigma_indep = 0.3;
    config.max_total_steps = 2000;
    config.init_box = InitBox::cube(dim, -1.0, 1.0);
    if k > 100 {
        config.trace_stride = 10;
    }
    Ok(NamedExperiment {
        name,
        problem,
        config,
        algorithm: Algorithm::Algorithm2,
        success_rule: SuccessRule::Thomson { rel_tol: 0.05, constraint_tol: 1e-3 },
        n_runs: 100,
    })
}
