use crate::config::SolverConfig;
use crate::constraints::{Constraint, ConstraintSet, Segment};
use crate::error::Result;
use crate::problem::Problem;

use super::{Algorithm, NamedExperiment, SuccessRule};

/// Constraint used with the `min |v|^2` benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadraticConstraint {
    Segment,
    Ellipse,
    Line,
}

fn squared_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// `(v1 + 1)^2 / 2 + v2^2 - 1 = 0`.
pub fn ellipse_constraint() -> Constraint {
    Constraint::analytic(
        |v| (v[0] + 1.0).powi(2) / 2.0 + v[1] * v[1] - 1.0,
        |v, o| {
            o[0] = v[0] + 1.0;
            o[1] = 2.0 * v[1];
        },
    )
    .with_hessian(|_, o| o.copy_from_slice(&[1.0, 0.0, 0.0, 2.0]))
    .with_label("ellipse")
}

pub fn make_quadratic(kind: QuadraticConstraint) -> Result<NamedExperiment> {
    let (name, dim, constraint, vstar) = match kind {
        QuadraticConstraint::Segment => (
            "quadratic-segment",
            3,
            Constraint::distance(Segment::new(vec![1.6, 0.2, 0.4], vec![-0.3, -0.7, 0.5])?).with_label("segment"),
            vec![0.2361, -0.446, 0.4718],
        ),
        QuadraticConstraint::Ellipse => ("quadratic-ellipse", 2, ellipse_constraint(), vec![2f64.sqrt() - 1.0, 0.0]),
        QuadraticConstraint::Line => {
            ("quadratic-line", 2, Constraint::linear(vec![1.0, 1.0], 3.0).with_label("line"), vec![1.5, 1.5])
        }
    };
    let problem =
        Problem::new(name, dim, squared_norm, ConstraintSet::new(dim, vec![constraint])?)?.with_minimizer(vstar)?;
    let config = SolverConfig::new(dim);
    Ok(NamedExperiment {
        name: name.to_string(),
        problem,
        config,
        algorithm: Algorithm::Algorithm1,
        success_rule: SuccessRule::InfNorm { tol: 0.1 },
        n_runs: 100,
    })
}
