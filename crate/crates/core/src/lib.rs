//! Gradient-free constrained global minimization with consensus-based
//! particle dynamics.
//!
//! Particles drift toward a Gibbs-weighted consensus point, explore with
//! anisotropic noise, and are pushed onto `{G = 0}` by a stiff forcing term
//! `(1/eps) grad G` that is integrated semi-implicitly, so the time step
//! does not have to shrink with `eps`.

pub mod baselines;
pub mod config;
pub mod consensus;
pub mod constraints;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod par;
pub mod problem;
pub mod problems;
pub mod rng;
pub mod solver;

pub use config::{Execution, InitBox, SolverConfig};
pub use consensus::{argmin_particle, compute_consensus, ConsensusPoint};
pub use constraints::{Constraint, ConstraintSet};
pub use ensemble::{init_ensemble, Ensemble};
pub use error::{CcboError, Result};
pub use problem::Problem;
pub use rng::RngStream;
pub use solver::{run_algorithm1, run_algorithm2, DecayTrace, RunRecord, StopReason, TraceRecord};
