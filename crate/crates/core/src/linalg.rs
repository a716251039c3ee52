//! Small dense linear algebra: row-major matrices, Cholesky factorization,
//! and the handful of solves the optimizers need. Problem sizes stay in the
//! hundreds, so everything is direct and allocation-friendly.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Dense row-major matrix of `f64`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `self * x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ * x`.
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, xi) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * xi;
            }
        }
        out
    }

    /// Gram matrix `selfᵀ * self`.
    pub fn gram(&self) -> Matrix {
        let mut g = Matrix::zeros(self.cols, self.cols);
        for i in 0..self.rows {
            let row = self.row(i);
            for a in 0..self.cols {
                for b in a..self.cols {
                    g[(a, b)] += row[a] * row[b];
                }
            }
        }
        for a in 0..self.cols {
            for b in 0..a {
                g[(a, b)] = g[(b, a)];
            }
        }
        g
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Symmetry check with a relative tolerance.
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs().max(1.0);
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                if (self[(i, j)] - self[(j, i)]).abs() > rel_tol * scale {
                    return false;
                }
            }
        }
        true
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Lower Cholesky factor `L` with `L Lᵀ = m`, or `None` when a pivot is
/// not strictly positive (matrix not positive definite to working precision).
pub fn cholesky(m: &Matrix) -> Option<Matrix> {
    assert!(m.is_square());
    let n = m.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d.is_nan() || d <= 0.0 || d.is_infinite() {
            return None;
        }
        let dj = d.sqrt();
        l[(j, j)] = dj;
        for i in j + 1..n {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / dj;
        }
    }
    Some(l)
}

/// Solves `L Lᵀ x = b` given the lower factor.
pub fn chol_solve(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    assert_eq!(b.len(), n);
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[(i, k)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[(k, i)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    y
}

/// Outcome of a symmetric positive semidefinite solve attempt.
#[derive(Debug)]
pub enum SpdSolve {
    /// Strictly positive pivots throughout.
    Definite(Vec<f64>),
    /// A ridge of the reported magnitude was added to handle a singular
    /// (positive semidefinite) system.
    Regularized(Vec<f64>, f64),
}

/// Solves `m x = b` for symmetric positive semidefinite `m`.
///
/// Plain Cholesky first; on a zero pivot the system is re-solved with a tiny
/// ridge. A pivot that is negative beyond `curvature_tol * scale` means the
/// matrix is indefinite and the offending pivot index is returned as the error.
pub fn solve_spd(m: &Matrix, b: &[f64], curvature_tol: f64) -> Result<SpdSolve> {
    let n = m.rows();
    assert!(m.is_square());
    assert_eq!(b.len(), n);
    if let Some(l) = cholesky(m) {
        return Ok(SpdSolve::Definite(chol_solve(&l, b)));
    }
    let scale = m.max_abs().max(1.0);
    if let Some(neg) = first_negative_pivot(m, curvature_tol * scale) {
        return Err(Error::IndefiniteRestriction { coords: vec![neg] });
    }
    let mut ridge = 1e-12 * scale;
    for _ in 0..4 {
        let mut shifted = m.clone();
        for i in 0..n {
            shifted[(i, i)] += ridge;
        }
        if let Some(l) = cholesky(&shifted) {
            return Ok(SpdSolve::Regularized(chol_solve(&l, b), ridge));
        }
        ridge *= 1e3;
    }
    Err(Error::SolverStalled(
        "semidefinite solve failed even with a ridge".into(),
    ))
}

/// Runs the factorization symbolically and reports the first pivot below
/// `-threshold`, i.e. a direction of genuinely negative curvature.
fn first_negative_pivot(m: &Matrix, threshold: f64) -> Option<usize> {
    let n = m.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d < -threshold {
            return Some(j);
        }
        if d <= 0.0 {
            // Semidefinite direction: stop factoring, caller falls back to a ridge.
            return None;
        }
        let dj = d.sqrt();
        l[(j, j)] = dj;
        for i in j + 1..n {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / dj;
        }
    }
    None
}
