//! Euclidean projections onto the convex sets used as distance constraints,
//! with their almost-everywhere differentials.

use std::fmt;

use crate::error::{CcboError, Result};

/// Projection onto a closed convex set `K`.
pub trait ConvexProjector: Send + Sync + fmt::Debug {
    /// Dimension of the space the projector acts on.
    fn dim(&self) -> usize;

    /// Writes `P_K(v)` into `out`.
    fn project(&self, v: &[f64], out: &mut [f64]);

    /// Writes the Jacobian `DP_K(v)` (row-major, `dim x dim`) into `out`.
    ///
    /// On a boundary between projection cells the differential of the cell
    /// closer to the interior of `K` is used.
    fn differential(&self, v: &[f64], out: &mut [f64]);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Closest point to `v` on the segment `[a, b]`.
pub fn project_segment(v: &[f64], a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let seg = Segment::new(a.to_vec(), b.to_vec())?;
    let mut out = vec![0.0; v.len()];
    seg.project(v, &mut out);
    Ok(out)
}

/// Projection onto `{v : v_i = 0 for inactive i, sum_{active} v_i^2 <= r^2}`.
pub fn project_ball_in_subspace(v: &[f64], radius: f64, active_dims: &[usize]) -> Vec<f64> {
    let ball = BallInSubspace::new(v.len(), radius, active_dims.to_vec());
    let mut out = vec![0.0; v.len()];
    ball.project(v, &mut out);
    out
}

/// Line segment between two distinct points.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    a: Vec<f64>,
    dir: Vec<f64>,
    len_sq: f64,
}

impl Segment {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(CcboError::Config("segment endpoints have different lengths".into()));
        }
        let dir: Vec<f64> = b.iter().zip(&a).map(|(b, a)| b - a).collect();
        let len_sq = dot(&dir, &dir);
        if len_sq == 0.0 {
            return Err(CcboError::DegenerateSegment);
        }
        Ok(Self { a, dir, len_sq })
    }

    /// Unclamped position parameter of the foot point.
    fn parameter(&self, v: &[f64]) -> f64 {
        let proj: f64 = v.iter().zip(&self.a).zip(&self.dir).map(|((v, a), d)| (v - a) * d).sum();
        proj / self.len_sq
    }
}

impl ConvexProjector for Segment {
    fn dim(&self) -> usize {
        self.a.len()
    }

    fn project(&self, v: &[f64], out: &mut [f64]) {
        let t = self.parameter(v).clamp(0.0, 1.0);
        for ((o, a), d) in out.iter_mut().zip(&self.a).zip(&self.dir) {
            *o = a + t * d;
        }
    }

    fn differential(&self, v: &[f64], out: &mut [f64]) {
        let n = self.dim();
        let t = self.parameter(v);
        if (0.0..=1.0).contains(&t) {
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = self.dir[i] * self.dir[j] / self.len_sq;
                }
            }
        } else {
            out[..n * n].fill(0.0);
        }
    }
}

/// Ball of a given radius inside the coordinate subspace spanned by `active`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallInSubspace {
    dim: usize,
    radius: f64,
    active: Vec<bool>,
}

impl BallInSubspace {
    pub fn new(dim: usize, radius: f64, active_dims: Vec<usize>) -> Self {
        let mut active = vec![false; dim];
        for i in active_dims {
            active[i] = true;
        }
        Self { dim, radius, active }
    }

    fn active_norm(&self, v: &[f64]) -> f64 {
        v.iter()
            .zip(&self.active)
            .filter(|(_, a)| **a)
            .map(|(x, _)| x * x)
            .sum::<f64>()
            .sqrt()
    }
}

impl ConvexProjector for BallInSubspace {
    fn dim(&self) -> usize {
        self.dim
    }

    fn project(&self, v: &[f64], out: &mut [f64]) {
        let norm = self.active_norm(v);
        let scale = if norm > self.radius { self.radius / norm } else { 1.0 };
        for ((o, x), a) in out.iter_mut().zip(v).zip(&self.active) {
            *o = if *a { x * scale } else { 0.0 };
        }
    }

    fn differential(&self, v: &[f64], out: &mut [f64]) {
        let n = self.dim;
        out[..n * n].fill(0.0);
        let norm = self.active_norm(v);
        if norm <= self.radius {
            for i in (0..n).filter(|&i| self.active[i]) {
                out[i * n + i] = 1.0;
            }
        } else {
            let s = self.radius / norm;
            for i in (0..n).filter(|&i| self.active[i]) {
                for j in (0..n).filter(|&j| self.active[j]) {
                    let uu = v[i] * v[j] / (norm * norm);
                    out[i * n + j] = s * (if i == j { 1.0 } else { 0.0 } - uu);
                }
            }
        }
    }
}
