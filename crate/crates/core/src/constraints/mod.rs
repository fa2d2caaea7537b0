//! Equality constraint systems `{g_i = 0}` and the assembled penalty
//! `G = sum_i g_i^2` with its gradient and per-constraint Hessians.

mod projection;

use std::fmt;
use std::sync::Arc;

pub use projection::{project_ball_in_subspace, project_segment, BallInSubspace, ConvexProjector, Segment};

use crate::error::{CcboError, Result};
use crate::linalg::{is_positive_definite, Matrix};

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Writes a vector (gradient) for the given point into the output slice.
pub type VectorFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
/// Writes a row-major square matrix (Hessian) into the output slice.
pub type MatrixFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Analytic { value: ScalarFn, gradient: VectorFn, hessian: Option<MatrixFn> },
    Distance(Arc<dyn ConvexProjector>),
}

/// One equality constraint.
///
/// Functions receive only the coordinates listed in `support` (in that
/// order), or the full vector when no support is declared.
#[derive(Clone)]
pub struct Constraint {
    kind: Kind,
    support: Option<Vec<usize>>,
    label: String,
    sphere_radius: Option<f64>,
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            Kind::Analytic { hessian, .. } => {
                if hessian.is_some() {
                    "analytic"
                } else {
                    "analytic (gradient only)"
                }
            }
            Kind::Distance(_) => "distance-to-set",
        };
        f.debug_struct("Constraint")
            .field("label", &self.label)
            .field("kind", &kind)
            .field("support", &self.support)
            .finish()
    }
}

impl Constraint {
    /// `g(v) = 0` with an analytic gradient; the Hessian defaults to the
    /// Gauss-Newton surrogate until [`Constraint::with_hessian`] is called.
    pub fn analytic(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind: Kind::Analytic { value: Arc::new(value), gradient: Arc::new(gradient), hessian: None },
            support: None,
            label: "analytic".into(),
            sphere_radius: None,
        }
    }

    /// `dist(v, K) = 0` for a convex set `K` given by its projector.
    pub fn distance(projector: impl ConvexProjector + 'static) -> Self {
        Self {
            kind: Kind::Distance(Arc::new(projector)),
            support: None,
            label: "distance".into(),
            sphere_radius: None,
        }
    }

    /// `a . v - b = 0`.
    pub fn linear(a: Vec<f64>, b: f64) -> Self {
        let grad = a.clone();
        let n = a.len();
        Self::analytic(
            move |v| a.iter().zip(v).map(|(a, v)| a * v).sum::<f64>() - b,
            move |_, out| out.copy_from_slice(&grad),
        )
        .with_hessian(move |_, out| out[..n * n].fill(0.0))
        .with_label("linear")
    }

    /// `|v|^2 - r^2 = 0`.
    pub fn sphere(radius: f64) -> Self {
        let r2 = radius * radius;
        Self::analytic(
            move |v| v.iter().map(|x| x * x).sum::<f64>() - r2,
            |v, out| out.iter_mut().zip(v).for_each(|(o, x)| *o = 2.0 * x),
        )
        .with_hessian(|v, out| {
            let n = v.len();
            out[..n * n].fill(0.0);
            for i in 0..n {
                out[i * n + i] = 2.0;
            }
        })
        .with_label("sphere")
        .tagged_sphere(radius)
    }

    fn tagged_sphere(mut self, radius: f64) -> Self {
        self.sphere_radius = Some(radius);
        self
    }

    /// Radius `r` if this is the constraint `|v|^2 - r^2 = 0`.
    pub fn sphere_radius(&self) -> Option<f64> {
        self.sphere_radius
    }

    pub fn with_hessian(mut self, hessian: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        if let Kind::Analytic { hessian: h, .. } = &mut self.kind {
            *h = Some(Arc::new(hessian));
        }
        self
    }

    pub fn with_support(mut self, support: Vec<usize>) -> Self {
        self.support = Some(support);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn support(&self) -> Option<&[usize]> {
        self.support.as_deref()
    }

    pub fn is_distance(&self) -> bool {
        matches!(self.kind, Kind::Distance(_))
    }

    /// Whether `hess_gsq` is the exact Hessian of `g^2` (not Gauss-Newton).
    pub fn has_exact_hessian(&self) -> bool {
        match &self.kind {
            Kind::Analytic { hessian, .. } => hessian.is_some(),
            Kind::Distance(_) => true,
        }
    }

    /// Projector for distance constraints.
    pub fn projector(&self) -> Option<&dyn ConvexProjector> {
        match &self.kind {
            Kind::Distance(p) => Some(p.as_ref()),
            Kind::Analytic { .. } => None,
        }
    }

    /// Raw analytic gradient `grad g` on local coordinates.
    pub fn constraint_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        match &self.kind {
            Kind::Analytic { gradient, .. } => {
                let mut out = vec![0.0; x.len()];
                gradient(x, &mut out);
                Some(out)
            }
            Kind::Distance(_) => None,
        }
    }

    /// `g(x)` on local coordinates; for distance constraints, `dist(x, K)`.
    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.kind {
            Kind::Analytic { value, .. } => value(x),
            Kind::Distance(p) => {
                let mut px = vec![0.0; x.len()];
                p.project(x, &mut px);
                x.iter().zip(&px).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
            }
        }
    }

    /// Evaluates `g^2`, accumulates `grad[g^2]` into `grad`, and, when
    /// `hess` is given, accumulates `hess[g^2]` (row-major, `k x k` with
    /// `k = x.len()`) into it. Returns `g`.
    fn accumulate(&self, x: &[f64], grad: &mut [f64], hess: Option<(&mut [f64], &mut [f64])>) -> f64 {
        let k = x.len();
        match &self.kind {
            Kind::Analytic { value, gradient, hessian } => {
                let g = value(x);
                let mut dg = vec![0.0; k];
                gradient(x, &mut dg);
                for (o, d) in grad.iter_mut().zip(&dg) {
                    *o += 2.0 * g * d;
                }
                if let Some((h, gn)) = hess {
                    for i in 0..k {
                        for j in 0..k {
                            gn[i * k + j] += 2.0 * dg[i] * dg[j];
                        }
                    }
                    if let Some(hf) = hessian {
                        let mut d2g = vec![0.0; k * k];
                        hf(x, &mut d2g);
                        for i in 0..k {
                            for j in 0..k {
                                h[i * k + j] += 2.0 * (dg[i] * dg[j] + g * d2g[i * k + j]);
                            }
                        }
                    } else {
                        for i in 0..k {
                            for j in 0..k {
                                h[i * k + j] += 2.0 * dg[i] * dg[j];
                            }
                        }
                    }
                }
                g
            }
            Kind::Distance(p) => {
                let mut px = vec![0.0; k];
                p.project(x, &mut px);
                let mut dist_sq = 0.0;
                for ((o, a), b) in grad.iter_mut().zip(x).zip(&px) {
                    *o += 2.0 * (a - b);
                    dist_sq += (a - b) * (a - b);
                }
                if let Some((h, gn)) = hess {
                    let mut dp = vec![0.0; k * k];
                    p.differential(x, &mut dp);
                    for i in 0..k {
                        for j in 0..k {
                            let id = if i == j { 1.0 } else { 0.0 };
                            let v = 2.0 * (id - dp[i * k + j]);
                            h[i * k + j] += v;
                            gn[i * k + j] += v;
                        }
                    }
                }
                dist_sq.sqrt()
            }
        }
    }
}

/// Ordered list of constraints over `R^dim` plus a block partition of the
/// coordinates such that every constraint lives inside one block.
#[derive(Clone, Debug)]
pub struct ConstraintSet {
    dim: usize,
    constraints: Vec<Constraint>,
    /// Effective support of each constraint (full range if undeclared).
    supports: Vec<Vec<usize>>,
    blocks: Vec<Vec<usize>>,
    /// Block index of each constraint.
    block_of: Vec<usize>,
    /// Position of each support coordinate inside its block.
    local_index: Vec<Vec<usize>>,
    /// Offset of each block's matrix in a flat block-Hessian buffer.
    hess_offsets: Vec<usize>,
}

/// Per-particle constraint terms ready for the semi-implicit solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingTerms {
    /// `sum_i grad[g_i^2]`, length `dim`.
    pub gradient: Vec<f64>,
    /// `sum_i hess[g_i^2]` restricted to each block, row-major, concatenated
    /// in block order.
    pub block_hessians: Vec<f64>,
    /// Constraints whose term was replaced by its Gauss-Newton part.
    pub n_gauss_newton: usize,
}

fn union_find_blocks(dim: usize, supports: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..dim).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for s in supports {
        if let Some((&first, rest)) = s.split_first() {
            for &c in rest {
                let (ra, rb) = (find(&mut parent, first), find(&mut parent, c));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut root_block = vec![usize::MAX; dim];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for c in 0..dim {
        let r = find(&mut parent, c);
        if root_block[r] == usize::MAX {
            root_block[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[root_block[r]].push(c);
    }
    blocks
}

impl ConstraintSet {
    /// Unconstrained: `G = 0`.
    pub fn empty(dim: usize) -> Self {
        Self::new(dim, Vec::new()).expect("empty constraint set is always valid")
    }

    /// Builds the set; the block partition is derived from declared supports
    /// when every constraint declares one, otherwise a single dense block.
    pub fn new(dim: usize, constraints: Vec<Constraint>) -> Result<Self> {
        let mut supports = Vec::with_capacity(constraints.len());
        for c in &constraints {
            let s = match &c.support {
                Some(s) => {
                    if s.is_empty() || s.iter().any(|&i| i >= dim) || s.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(CcboError::Config(format!(
                            "constraint {:?} support must be a non-empty sorted list of indices below {dim}",
                            c.label
                        )));
                    }
                    s.clone()
                }
                None => (0..dim).collect(),
            };
            if let Some(p) = c.projector() {
                if p.dim() != s.len() {
                    return Err(CcboError::Config(format!(
                        "projector of {:?} acts on dimension {} but its support has {} coordinates",
                        c.label,
                        p.dim(),
                        s.len()
                    )));
                }
            }
            supports.push(s);
        }
        // blocks are kept sorted; local indices rely on it
        let blocks = if constraints.iter().all(|c| c.support.is_some()) {
            union_find_blocks(dim, &supports)
        } else {
            vec![(0..dim).collect()]
        };
        Self::with_blocks(dim, constraints, supports, blocks)
    }

    fn with_blocks(
        dim: usize,
        constraints: Vec<Constraint>,
        supports: Vec<Vec<usize>>,
        blocks: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let mut owner = vec![usize::MAX; dim];
        for (b, block) in blocks.iter().enumerate() {
            for &c in block {
                if c >= dim || owner[c] != usize::MAX {
                    return Err(CcboError::Config(format!(
                        "block partition is not a partition of 0..{dim} (coordinate {c})"
                    )));
                }
                owner[c] = b;
            }
        }
        if owner.iter().any(|&o| o == usize::MAX) {
            return Err(CcboError::Config("block partition does not cover every coordinate".into()));
        }
        let mut block_of = Vec::with_capacity(supports.len());
        let mut local_index = Vec::with_capacity(supports.len());
        for (i, s) in supports.iter().enumerate() {
            let b = owner[s[0]];
            if s.iter().any(|&c| owner[c] != b) {
                return Err(CcboError::Config(format!(
                    "constraint {i} ({:?}) spans more than one block",
                    constraints[i].label
                )));
            }
            let block = &blocks[b];
            local_index.push(s.iter().map(|c| block.binary_search(c).expect("blocks are sorted")).collect());
            block_of.push(b);
        }
        let mut hess_offsets = Vec::with_capacity(blocks.len() + 1);
        let mut off = 0;
        for b in &blocks {
            hess_offsets.push(off);
            off += b.len() * b.len();
        }
        hess_offsets.push(off);
        Ok(Self { dim, constraints, supports, blocks, block_of, local_index, hess_offsets })
    }

    /// Replaces the block partition with a user-supplied one, validating it.
    pub fn with_block_partition(self, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        for b in &mut blocks {
            b.sort_unstable();
        }
        Self::with_blocks(self.dim, self.constraints, self.supports, blocks)
    }

    /// Same constraints with a single dense block.
    pub fn dense(self) -> Self {
        let dim = self.dim;
        Self::with_blocks(dim, self.constraints, self.supports, vec![(0..dim).collect()])
            .expect("a single block always contains every support")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn support_of(&self, i: usize) -> &[usize] {
        &self.supports[i]
    }

    fn gather(&self, i: usize, v: &[f64]) -> Vec<f64> {
        self.supports[i].iter().map(|&c| v[c]).collect()
    }

    fn check_point(v: &[f64]) -> Result<()> {
        if v.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(CcboError::ConstraintEvaluation("point has non-finite coordinates".into()))
        }
    }

    /// `g_i(v)` for every constraint (distance constraints report `dist(v, K)`).
    pub fn values(&self, v: &[f64]) -> Result<Vec<f64>> {
        Self::check_point(v)?;
        let out: Vec<f64> = (0..self.len()).map(|i| self.constraints[i].value(&self.gather(i, v))).collect();
        match out.iter().position(|g| !g.is_finite()) {
            Some(i) => Err(CcboError::ConstraintEvaluation(format!("constraint {i} is not finite"))),
            None => Ok(out),
        }
    }

    /// `sum_i |g_i(v)|`.
    pub fn abs_sum(&self, v: &[f64]) -> Result<f64> {
        Ok(self.values(v)?.iter().map(|g| g.abs()).sum())
    }

    /// `G(v) = sum_i g_i(v)^2`.
    pub fn eval_g(&self, v: &[f64]) -> Result<f64> {
        Ok(self.values(v)?.iter().map(|g| g * g).sum())
    }

    /// `grad G(v) = sum_i grad[g_i^2](v)`.
    pub fn grad_g(&self, v: &[f64]) -> Result<Vec<f64>> {
        Self::check_point(v)?;
        let mut out = vec![0.0; self.dim];
        for (i, c) in self.constraints.iter().enumerate() {
            let x = self.gather(i, v);
            let mut local = vec![0.0; x.len()];
            c.accumulate(&x, &mut local, None);
            for (&coord, g) in self.supports[i].iter().zip(&local) {
                out[coord] += g;
            }
        }
        if out.iter().all(|x| x.is_finite()) {
            Ok(out)
        } else {
            Err(CcboError::ConstraintEvaluation("gradient is not finite".into()))
        }
    }

    /// Dense `sum_i hess[g_i^2](v)`.
    pub fn hess_gsq(&self, v: &[f64]) -> Result<Matrix> {
        let terms = self.forcing_terms(v)?;
        let mut m = Matrix::zeros(self.dim);
        for (b, block) in self.blocks.iter().enumerate() {
            let nb = block.len();
            let h = &terms.block_hessians[self.hess_offsets[b]..self.hess_offsets[b + 1]];
            for (li, &gi) in block.iter().enumerate() {
                for (lj, &gj) in block.iter().enumerate() {
                    m[(gi, gj)] = h[li * nb + lj];
                }
            }
        }
        Ok(m)
    }

    /// Gradient and block Hessians of `G` at `v` in one pass.
    pub fn forcing_terms(&self, v: &[f64]) -> Result<ForcingTerms> {
        self.assemble(v, None)
    }

    /// As [`forcing_terms`](Self::forcing_terms), but a constraint whose own
    /// `I + scale hess[g_i^2]` is not positive definite contributes only
    /// `2 grad g_i grad g_i^T`. With an indefinite system the step is drawn
    /// to critical points of `g_i^2` that are not zeros, such as the centre
    /// of a sphere. Decided per constraint, so block and dense assembly agree.
    pub fn stabilized_forcing_terms(&self, v: &[f64], scale: f64) -> Result<ForcingTerms> {
        self.assemble(v, Some(scale))
    }

    fn assemble(&self, v: &[f64], stabilize: Option<f64>) -> Result<ForcingTerms> {
        Self::check_point(v)?;
        let mut gradient = vec![0.0; self.dim];
        let mut block_hessians = vec![0.0; *self.hess_offsets.last().unwrap_or(&0)];
        let mut n_gauss_newton = 0;
        for (i, c) in self.constraints.iter().enumerate() {
            let x = self.gather(i, v);
            let k = x.len();
            let mut g_local = vec![0.0; k];
            let mut h_local = vec![0.0; k * k];
            let mut gn_local = vec![0.0; k * k];
            c.accumulate(&x, &mut g_local, Some((&mut h_local, &mut gn_local)));
            if let Some(scale) = stabilize {
                let mut a = Matrix::from_row_major(k, h_local.iter().map(|h| h * scale).collect());
                a.add_diagonal(1.0);
                if !is_positive_definite(&a) {
                    h_local = gn_local;
                    n_gauss_newton += 1;
                }
            }
            for (&coord, g) in self.supports[i].iter().zip(&g_local) {
                gradient[coord] += g;
            }
            let b = self.block_of[i];
            let nb = self.blocks[b].len();
            let h = &mut block_hessians[self.hess_offsets[b]..self.hess_offsets[b + 1]];
            let li = &self.local_index[i];
            for r in 0..k {
                for s in 0..k {
                    h[li[r] * nb + li[s]] += h_local[r * k + s];
                }
            }
        }
        if gradient.iter().chain(&block_hessians).all(|x| x.is_finite()) {
            Ok(ForcingTerms { gradient, block_hessians, n_gauss_newton })
        } else {
            Err(CcboError::ConstraintEvaluation("forcing terms are not finite".into()))
        }
    }

    /// Slice of a block's Hessian inside [`ForcingTerms::block_hessians`].
    pub fn block_hessian<'a>(&self, terms: &'a ForcingTerms, b: usize) -> &'a [f64] {
        &terms.block_hessians[self.hess_offsets[b]..self.hess_offsets[b + 1]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere3() -> ConstraintSet {
        ConstraintSet::new(3, vec![Constraint::sphere(1.0)]).unwrap()
    }

    fn unit_segment() -> ConstraintSet {
        let seg = Segment::new(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        ConstraintSet::new(2, vec![Constraint::distance(seg)]).unwrap()
    }

    #[test]
    fn eval_g_examples() {
        assert_eq!(sphere3().eval_g(&[1.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(sphere3().eval_g(&[2.0, 0.0, 0.0]).unwrap(), 9.0);
        assert!((unit_segment().eval_g(&[2.0, 1.0]).unwrap() - 2.0).abs() < 1e-15);
        assert!(sphere3().eval_g(&[f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn grad_g_examples() {
        assert_eq!(sphere3().grad_g(&[1.0, 0.0, 0.0]).unwrap(), vec![0.0; 3]);
        assert_eq!(sphere3().grad_g(&[2.0, 0.0, 0.0]).unwrap(), vec![24.0, 0.0, 0.0]);
        assert_eq!(unit_segment().grad_g(&[2.0, 1.0]).unwrap(), vec![2.0, 2.0]);
    }

    #[test]
    fn hessian_examples() {
        let lin = ConstraintSet::new(2, vec![Constraint::linear(vec![1.0, -2.0], 0.5)]).unwrap();
        let h = lin.hess_gsq(&[3.0, 7.0]).unwrap();
        assert_eq!(h.as_slice(), &[2.0, -4.0, -4.0, 8.0]);

        let v = [0.3, -1.2, 0.7];
        let h = sphere3().hess_gsq(&v).unwrap();
        let n2: f64 = v.iter().map(|x| x * x).sum();
        for i in 0..3 {
            for j in 0..3 {
                let expect = 8.0 * v[i] * v[j] + if i == j { 4.0 * (n2 - 1.0) } else { 0.0 };
                assert!((h[(i, j)] - expect).abs() < 1e-14);
            }
        }

        let h = unit_segment().hess_gsq(&[0.5, 1.0]).unwrap();
        assert_eq!(h.as_slice(), &[0.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn gauss_newton_without_hessian() {
        let c = Constraint::analytic(|v| v[0] * v[0] - v[1], |v, o| {
            o[0] = 2.0 * v[0];
            o[1] = -1.0;
        });
        assert!(!c.has_exact_hessian());
        let cs = ConstraintSet::new(2, vec![c]).unwrap();
        let h = cs.hess_gsq(&[1.0, 3.0]).unwrap();
        assert_eq!(h.as_slice(), &[8.0, -4.0, -4.0, 2.0]);
    }

    #[test]
    fn blocks_from_supports() {
        let cs = ConstraintSet::new(
            7,
            vec![
                Constraint::sphere(1.0).with_support(vec![0, 1, 2]),
                Constraint::sphere(1.0).with_support(vec![3, 4, 5]),
            ],
        )
        .unwrap();
        assert_eq!(cs.blocks(), &[vec![0, 1, 2], vec![3, 4, 5], vec![6]]);
        let cs = cs.with_block_partition(vec![vec![0, 1, 2, 6], vec![3, 4, 5]]).unwrap();
        assert_eq!(cs.blocks().len(), 2);
        assert!(cs.clone().with_block_partition(vec![vec![0, 1], vec![2, 3, 4, 5, 6]]).is_err());
        assert!(cs.clone().with_block_partition(vec![vec![0, 1, 2], vec![3, 4, 5]]).is_err());

        let mixed = ConstraintSet::new(
            4,
            vec![Constraint::sphere(1.0).with_support(vec![0, 1]), Constraint::linear(vec![1.0; 4], 1.0)],
        )
        .unwrap();
        assert_eq!(mixed.blocks(), &[vec![0, 1, 2, 3]]);
        assert_eq!(ConstraintSet::empty(3).blocks().len(), 3);
    }

    #[test]
    fn support_is_respected() {
        let cs = ConstraintSet::new(4, vec![Constraint::sphere(1.0).with_support(vec![1, 3])]).unwrap();
        let a = cs.eval_g(&[5.0, 1.0, -9.0, 0.0]).unwrap();
        let b = cs.eval_g(&[0.0, 1.0, 2.0, 0.0]).unwrap();
        assert_eq!(a, 0.0);
        assert_eq!(a, b);
        assert_eq!(cs.grad_g(&[5.0, 2.0, -9.0, 0.0]).unwrap(), vec![0.0, 24.0, 0.0, 0.0]);
    }

    #[test]
    fn invalid_support_rejected() {
        assert!(ConstraintSet::new(3, vec![Constraint::sphere(1.0).with_support(vec![2, 1])]).is_err());
        assert!(ConstraintSet::new(3, vec![Constraint::sphere(1.0).with_support(vec![3])]).is_err());
        let seg = Segment::new(vec![0.0; 3], vec![1.0; 3]).unwrap();
        assert!(ConstraintSet::new(2, vec![Constraint::distance(seg)]).is_err());
    }
}
