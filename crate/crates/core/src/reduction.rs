//! Elimination of the normalization constraint `||Ax||_1 = c0`.
//!
//! Given an index `j0` in the support of the truth, every consistent
//! `x` with `y^T A x = c0` is determined by its other `n - 1` coordinates
//! `z`, and `diag(y) A x = C z + d` where
//!
//! ```text
//! C = diag(y) (I - A_j0 y^T / (y^T A_j0)) A_rest
//! d = c0 / (y^T A_j0) * diag(y) A_j0
//! ```
//!
//! Consistency of `x` is then exactly `C z + d >= 0`.

use ndarray::{Array1, ArrayView1, ShapeBuilder};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{l2_norm, largest_magnitude_indices, numerical_support, sign_measure, Matrix};

/// Relative guard on `|y^T A_j0|`, scaled by `||A_j0||_2 * sqrt(m)`.
pub const PIVOT_THRESHOLD: f64 = 1e-12;

fn check_dims(a: &Matrix, y: &Array1<f64>) -> Result<()> {
    if a.nrows() != y.len() {
        return Err(Error::dim(format!("matrix has {} rows but y has length {}", a.nrows(), y.len())));
    }
    Ok(())
}

/// `j0 = argmax_i |A_i^T y|`, smallest index on ties.
pub fn select_first_index(a: &Matrix, y: &Array1<f64>) -> Result<usize> {
    check_dims(a, y)?;
    let proxy = a.t().dot(y);
    let best = largest_magnitude_indices(proxy.view(), 1, |_| true);
    match best.first() {
        Some(&j) if proxy[j] != 0.0 => Ok(j),
        _ => Err(Error::DegenerateMeasurements),
    }
}

/// Indices of the `k` largest entries of `|A^T y|`, descending, ties by index.
pub fn top_k_proxy_indices(a: &Matrix, y: &Array1<f64>, k: usize) -> Result<Vec<usize>> {
    check_dims(a, y)?;
    if k == 0 || k > a.ncols() {
        return Err(Error::dim(format!("k = {k} must satisfy 1 <= k <= n = {}", a.ncols())));
    }
    let proxy = a.t().dot(y);
    Ok(largest_magnitude_indices(proxy.view(), k, |_| true))
}

/// The reduced feasibility problem `C z + d >= 0` in `n - 1` unknowns.
#[derive(Debug, Clone)]
pub struct ReducedProblem {
    /// `m x (n-1)`, column-major.
    pub c: Matrix,
    pub d: Array1<f64>,
    pub j0: usize,
    pub c0: f64,
    /// Reduced column index to original column index.
    pub col_map: Vec<usize>,
    /// `y^T A_j0`.
    pub pivot: f64,
}

impl ReducedProblem {
    pub fn m(&self) -> usize {
        self.c.nrows()
    }

    /// Number of reduced unknowns, `n - 1`.
    pub fn dim(&self) -> usize {
        self.c.ncols()
    }

    /// `C z + d`.
    pub fn residual(&self, z: ArrayView1<f64>) -> Array1<f64> {
        let mut r = self.c.dot(&z);
        r += &self.d;
        r
    }

    /// Original index of reduced column `k`.
    pub fn original_index(&self, k: usize) -> usize {
        self.col_map[k]
    }
}

/// Builds `(C, d)` for pivot column `j0` without forming the `m x m` projector.
pub fn build_reduced_problem(a: &Matrix, y: &Array1<f64>, j0: usize, c0: f64) -> Result<ReducedProblem> {
    check_dims(a, y)?;
    let (m, n) = a.dim();
    if j0 >= n {
        return Err(Error::dim(format!("pivot index {j0} out of range for n = {n}")));
    }
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(Error::Config(format!("c0 must be positive and finite, got {c0}")));
    }
    let a_j0 = a.column(j0);
    let pivot = y.dot(&a_j0);
    let threshold = PIVOT_THRESHOLD * l2_norm(a_j0) * (m as f64).sqrt();
    if !(pivot.abs() > threshold) {
        return Err(Error::DegeneratePivot { j0, pivot, threshold });
    }

    let ya_j0: Array1<f64> = y * &a_j0;
    let col_map: Vec<usize> = (0..n).filter(|&j| j != j0).collect();
    let mut c = Matrix::zeros((m, n - 1).f());
    for (k, &j) in col_map.iter().enumerate() {
        let a_col = a.column(j);
        let coef = y.dot(&a_col) / pivot;
        let mut c_col = c.column_mut(k);
        for i in 0..m {
            c_col[i] = y[i] * a_col[i] - coef * ya_j0[i];
        }
    }
    let d = ya_j0 * (c0 / pivot);
    Ok(ReducedProblem { c, d, j0, c0, col_map, pivot })
}

/// Lifts a reduced vector back to `R^n`, solving for the pivot coordinate so
/// that `y^T A x = c0`.
pub fn lift_solution(z: ArrayView1<f64>, rp: &ReducedProblem, a: &Matrix, y: &Array1<f64>) -> Result<Array1<f64>> {
    check_dims(a, y)?;
    if z.len() != rp.dim() || a.ncols() != rp.dim() + 1 {
        return Err(Error::dim(format!(
            "reduced vector has length {} but the problem has {} unknowns",
            z.len(),
            rp.dim()
        )));
    }
    let mut x = Array1::zeros(a.ncols());
    let mut y_dot_rest = 0.0;
    for (k, &zk) in z.iter().enumerate() {
        if zk != 0.0 {
            let j = rp.col_map[k];
            x[j] = zk;
            y_dot_rest += zk * y.dot(&a.column(j));
        }
    }
    x[rp.j0] = (rp.c0 - y_dot_rest) / rp.pivot;
    Ok(x)
}

/// Consistency and sparsity report for a candidate solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionCertificate {
    pub consistent: bool,
    pub hamming_mismatches: usize,
    pub sparsity: usize,
    pub sparsity_ok: bool,
    pub l1_of_ax: f64,
    pub y_dot_ax: f64,
    /// `| ||Ax||_1 - c0 |`.
    pub normalization_gap: f64,
}

pub fn certify_solution(
    x: ArrayView1<f64>,
    a: &Matrix,
    y: &Array1<f64>,
    s: usize,
    c0: f64,
) -> Result<SolutionCertificate> {
    check_dims(a, y)?;
    if x.len() != a.ncols() {
        return Err(Error::dim(format!("x has length {} but A has {} columns", x.len(), a.ncols())));
    }
    let ax = a.dot(&x);
    let signs = sign_measure(ax.view());
    let hamming_mismatches = signs.iter().zip(y).filter(|(p, q)| p != q).count();
    let sparsity = numerical_support(x).len();
    let l1_of_ax = ax.iter().map(|v| v.abs()).sum::<f64>();
    Ok(SolutionCertificate {
        consistent: hamming_mismatches == 0,
        hamming_mismatches,
        sparsity,
        sparsity_ok: sparsity <= s,
        l1_of_ax,
        y_dot_ax: y.dot(&ax),
        normalization_gap: (l1_of_ax - c0).abs(),
    })
}
