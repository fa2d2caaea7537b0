//! Small dense linear algebra for the per-particle solves.

use crate::error::{CcboError, Result};

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data has wrong length");
        Self { n, data }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks_exact(self.n.max(1))
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.n.max(1))
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add_diagonal(&mut self, mu: f64) {
        for i in 0..self.n {
            self[(i, i)] += mu;
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Solves `a x = rhs` in place by Gaussian elimination with partial pivoting.
/// Returns `false` if a pivot falls below `pivot_tol`.
fn lu_solve_in_place(a: &mut [f64], n: usize, rhs: &mut [f64], pivot_tol: f64) -> bool {
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for i in k + 1..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if !(best >= pivot_tol) || best == 0.0 {
            return false;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            rhs.swap(k, p);
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            if f != 0.0 {
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
                rhs[i] -= f * rhs[k];
            }
        }
    }
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for j in k + 1..n {
            s -= a[k * n + j] * rhs[j];
        }
        rhs[k] = s / a[k * n + k];
    }
    true
}

/// Cholesky test on the symmetric part of `a`.
pub fn is_positive_definite(a: &Matrix) -> bool {
    let n = a.n();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = 0.5 * (a[(i, j)] + a[(j, i)]);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return false;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    true
}

/// Outcome of [`solve_damped_info`].
#[derive(Debug, Clone, PartialEq)]
pub struct DampedSolution {
    pub x: Vec<f64>,
    /// Levenberg shift `mu` added to the diagonal; 0 when none was needed.
    pub damping: f64,
}

const MIN_DAMPING: f64 = 1e-6;
const MAX_DAMPING: f64 = 1.0;

/// Solves `a x = rhs`, retrying with `a + mu I` (`mu = 1e-6, 2e-6, ...` up
/// to 1) when elimination hits a pivot below `1e-12 ||a||_inf` or the
/// residual of the solved system exceeds `1e-8 (1 + ||rhs||_inf)`.
pub fn solve_damped_info(a: &Matrix, rhs: &[f64]) -> Result<DampedSolution> {
    let n = a.n();
    if rhs.len() != n {
        return Err(CcboError::Solve(format!("rhs has length {} for a {n}x{n} system", rhs.len())));
    }
    if !a.is_finite() || rhs.iter().any(|x| !x.is_finite()) {
        return Err(CcboError::Solve("non-finite system".into()));
    }
    let scale = a.norm_inf();
    let pivot_tol = 1e-12 * scale;
    let rhs_tol = 1e-8 * (1.0 + rhs.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    let mut work = vec![0.0; n * n];
    let mut mu = 0.0;
    loop {
        work.copy_from_slice(a.as_slice());
        for i in 0..n {
            work[i * n + i] += mu;
        }
        let mut x = rhs.to_vec();
        if lu_solve_in_place(&mut work, n, &mut x, pivot_tol) {
            let ax = a.mul_vec(&x);
            let residual = ax
                .iter()
                .zip(&x)
                .zip(rhs)
                .map(|((ax, x), b)| (ax + mu * x - b).abs())
                .fold(0.0, f64::max);
            if residual <= rhs_tol {
                return Ok(DampedSolution { x, damping: mu });
            }
        }
        mu = if mu == 0.0 { MIN_DAMPING } else { mu * 2.0 };
        if mu > MAX_DAMPING {
            return Err(CcboError::Solve(format!(
                "system stays singular or inaccurate with damping up to {MAX_DAMPING}"
            )));
        }
    }
}

pub fn solve_damped(a: &Matrix, rhs: &[f64]) -> Result<Vec<f64>> {
    solve_damped_info(a, rhs).map(|s| s.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Cholesky solve, written separately from the elimination above.
    fn cholesky_solve(a: &Matrix, b: &[f64]) -> Vec<f64> {
        let n = a.n();
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
                if i == j {
                    l[i * n + i] = (a[(i, i)] - s).sqrt();
                } else {
                    l[i * n + j] = (a[(i, j)] - s) / l[j * n + j];
                }
            }
        }
        let mut y = vec![0.0; n];
        for i in 0..n {
            let s: f64 = (0..i).map(|k| l[i * n + k] * y[k]).sum();
            y[i] = (b[i] - s) / l[i * n + i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| l[k * n + i] * x[k]).sum();
            x[i] = (y[i] - s) / l[i * n + i];
        }
        x
    }

    #[test]
    fn identity_and_diagonal() {
        let r = vec![1.5, -2.0, 3.0];
        assert_eq!(solve_damped(&Matrix::identity(3), &r).unwrap(), r);
        let x = solve_damped(&Matrix::from_diagonal(&[1.0, 2.0]), &[2.0, 2.0]).unwrap();
        assert_eq!(x, vec![2.0, 1.0]);
    }

    #[test]
    fn random_spd_matches_cholesky() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 20;
        let b: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut a = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = (0..n).map(|k| b[i * n + k] * b[j * n + k]).sum();
            }
        }
        a.add_diagonal(0.5);
        let rhs: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let x = solve_damped(&a, &rhs).unwrap();
        let y = cholesky_solve(&a, &rhs);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() <= 1e-10 * (1.0 + v.abs()), "{u} vs {v}");
        }
    }

    #[test]
    fn positive_definite_check() {
        assert!(is_positive_definite(&Matrix::from_row_major(2, vec![2.0, 1.0, 1.0, 2.0])));
        assert!(!is_positive_definite(&Matrix::from_row_major(2, vec![1.0, 2.0, 2.0, 1.0])));
        assert!(!is_positive_definite(&Matrix::from_diagonal(&[1.0, 0.0])));
        assert!(!is_positive_definite(&Matrix::from_diagonal(&[-39.0, 1.0])));
    }

    #[test]
    fn singular_matrix_gets_damped() {
        let a = Matrix::from_row_major(2, vec![1.0, 1.0, 1.0, 1.0]);
        let s = solve_damped_info(&a, &[1.0, 1.0]).unwrap();
        assert!(s.damping >= 1e-6 && s.damping <= 1.0);
        assert!(s.x.iter().all(|x| x.is_finite()));
        let zero = Matrix::zeros(2);
        let s = solve_damped_info(&zero, &[1.0, 0.0]).unwrap();
        assert!((s.x[0] - 1.0 / s.damping).abs() < 1e-6 / s.damping);
    }

    #[test]
    fn non_finite_system_errors() {
        let a = Matrix::from_diagonal(&[f64::NAN, 1.0]);
        assert!(solve_damped(&a, &[1.0, 1.0]).is_err());
    }
}
