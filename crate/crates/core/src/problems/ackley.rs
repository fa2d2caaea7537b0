use std::f64::consts::{E, PI};

use crate::config::{InitBox, SolverConfig};
use crate::constraints::{BallInSubspace, Constraint, ConstraintSet, Segment};
use crate::error::{CcboError, Result};
use crate::problem::Problem;

use super::{Algorithm, NamedExperiment, SuccessRule};

/// Ackley function parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Ackley {
    pub a: f64,
    pub b: f64,
    pub big_a: f64,
    /// Unconstrained global minimizer.
    pub center: Vec<f64>,
}

impl Ackley {
    pub fn eval(&self, v: &[f64]) -> f64 {
        let d = v.len() as f64;
        let mut sq = 0.0;
        let mut cos = 0.0;
        for (x, c) in v.iter().zip(&self.center) {
            let t = x - c;
            sq += t * t;
            cos += (2.0 * PI * self.b * t).cos();
        }
        -self.big_a * (-self.a * (self.b * self.b / d * sq).sqrt()).exp() - (cos / d).exp() + E + self.big_a
    }

    pub fn into_objective(self) -> impl Fn(&[f64]) -> f64 + Send + Sync + 'static {
        move |v| self.eval(v)
    }
}

/// `sum_{i<d} v_i^2 - v_d = 0`.
pub fn paraboloid_constraint(dim: usize) -> Constraint {
    Constraint::analytic(
        move |v| v[..dim - 1].iter().map(|x| x * x).sum::<f64>() - v[dim - 1],
        move |v, o| {
            for i in 0..dim - 1 {
                o[i] = 2.0 * v[i];
            }
            o[dim - 1] = -1.0;
        },
    )
    .with_hessian(move |_, o| {
        o[..dim * dim].fill(0.0);
        for i in 0..dim - 1 {
            o[i * dim + i] = 2.0;
        }
    })
    .with_label("paraboloid")
}

/// Ackley benchmark in `d` in {3, 20} with one of the five constraint cases.
pub fn make_ackley(dim: usize, case: u8) -> Result<NamedExperiment> {
    let supported = matches!((dim, case), (3, 1) | (3, 3) | (3, 4) | (3, 5) | (20, 2) | (20, 3) | (20, 4));
    if !supported {
        return Err(CcboError::Config(format!("Ackley case {case} is not defined in dimension {dim}")));
    }
    let objective = Ackley { a: 0.1, b: 1.0, big_a: 20.0, center: vec![0.4; dim] };
    let (constraints, vstar): (Vec<Constraint>, Vec<f64>) = match case {
        1 => (
            vec![Constraint::distance(Segment::new(vec![0.2, 0.5, 0.7], vec![0.5, 0.2, 0.5])?).with_label("segment")],
            vec![0.4003, 0.2997, 0.5665],
        ),
        2 => {
            let mut v = vec![0.1179; 18];
            v.extend([0.0, 0.0]);
            (vec![Constraint::distance(BallInSubspace::new(20, 0.5, (0..18).collect())).with_label("ball")], v)
        }
        3 => (vec![Constraint::sphere(1.0)], vec![1.0 / (dim as f64).sqrt(); dim]),
        4 => {
            let v = if dim == 3 {
                vec![0.4283, 0.4283, 0.3669]
            } else {
                let mut v = vec![0.3542; 19];
                v.push(2.3839);
                v
            };
            (vec![paraboloid_constraint(dim)], v)
        }
        5 => (
            vec![
                Constraint::linear(vec![1.0, 1.0, 1.0], 1.0),
                Constraint::linear(vec![2.0, 2.0, -0.5], 0.5),
            ],
            vec![0.2, 0.2, 0.6],
        ),
        _ => unreachable!("checked above"),
    };
    let name = format!("ackley-d{dim}-case{case}");
    let problem =
        Problem::new(&name, dim, objective.into_objective(), ConstraintSet::new(dim, constraints)?)?.with_minimizer(vstar)?;
    let mut config = SolverConfig::new(dim);
    config.n_particles = 100;
    config.sigma = 1.0;
    let algorithm = if dim == 3 {
        Algorithm::Algorithm1
    } else {
        let (sigma_indep, budget) = match case {
            2 | 3 => (0.3, 2000),
            _ => (1.0, 10_000),
        };
        config.eps_indep = 1e-5;
        // Inner loops run to full collapse; stopping them at a spread of
        // 0.01 leaves the consensus point visibly off the constraint.
        config.eps_stop = 1e-14;
        config.sigma_indep = sigma_indep;
        // The energy gap between successive inner loops rarely drops below
        // eps_indep, so the total budget is what ends most runs.
        config.max_total_steps = budget;
        Algorithm::Algorithm2
    };
    Ok(NamedExperiment {
        name,
        problem,
        config,
        algorithm,
        success_rule: SuccessRule::InfNorm { tol: 0.1 },
        n_runs: 100,
    })
}

/// The three two-dimensional comparison instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComparisonCase {
    /// Circle; constrained and unconstrained minimizers coincide.
    A,
    /// Circle; the unconstrained minimizer is off the circle.
    B,
    /// Parabola `v1^2 = v2`.
    C,
}

impl ComparisonCase {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "a" => Some(Self::A),
            "b" => Some(Self::B),
            "c" => Some(Self::C),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Self::A => 'a',
            Self::B => 'b',
            Self::C => 'c',
        }
    }
}

/// Primary, penalized and (for circles) projected variants of one case.
pub fn make_ackley_comparison(case: ComparisonCase) -> Result<Vec<NamedExperiment>> {
    let s = 0.5f64.sqrt();
    let (center, constraint, vstar) = match case {
        ComparisonCase::A => (vec![s, -s], Constraint::sphere(1.0), vec![s, -s]),
        ComparisonCase::B => {
            let x = 0.781475f64;
            (vec![0.5, 1.0 / 3.0], Constraint::sphere(1.0), vec![x, (1.0 - x * x).sqrt()])
        }
        ComparisonCase::C => {
            let parabola = Constraint::analytic(|v| v[0] * v[0] - v[1], |v, o| {
                o[0] = 2.0 * v[0];
                o[1] = -1.0;
            })
            .with_hessian(|_, o| o.copy_from_slice(&[2.0, 0.0, 0.0, 0.0]))
            .with_label("parabola");
            (vec![0.5, 1.0 / 3.0], parabola, vec![0.5428, 0.5428 * 0.5428])
        }
    };
    let objective = Ackley { a: 0.2, b: 3.0, big_a: 20.0, center };
    let base = format!("ackley-case-{}", case.letter());
    let problem = Problem::new(&base, 2, objective.into_objective(), ConstraintSet::new(2, vec![constraint])?)?
        .with_minimizer(vstar)?;
    let mut config = SolverConfig::new(2);
    config.n_particles = 50;
    config.alpha = 30.0;
    config.epsilon = 0.01;
    config.lambda = 1.0;
    config.sigma = 1.0;
    config.gamma = 0.01;
    config.eps_stop = 0.0;
    config.max_steps = 300;
    config.init_box = InitBox::cube(2, -3.0, 3.0);

    let mut algorithms = vec![Algorithm::Algorithm1, Algorithm::Penalized];
    if case != ComparisonCase::C {
        algorithms.push(Algorithm::Projected);
    }
    Ok(algorithms
        .into_iter()
        .map(|algorithm| {
            let mut p = problem.clone();
            let name = match algorithm {
                Algorithm::Algorithm1 => base.clone(),
                Algorithm::Penalized => format!("{base}-penalized"),
                _ => format!("{base}-projected"),
            };
            p.name = name.clone();
            NamedExperiment {
                name,
                problem: p,
                config: config.clone(),
                algorithm,
                success_rule: SuccessRule::InfNorm { tol: 0.01 },
                n_runs: 100,
            }
        })
        .collect())
}
