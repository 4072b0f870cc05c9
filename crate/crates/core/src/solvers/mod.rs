//! Inner minimization engines for the update step.
//!
//! Both objectives measure how badly `C_L z + d >= 0` is violated on an
//! active column set `L`:
//!
//! * L2: `f(z) = ||(C_L z + d)_-||_2^2`, which is C^1 and convex. Solved by
//!   the two-point step size (Barzilai-Borwein) gradient method.
//! * L1: `f(z) = ||(C_L z + d)_-||_1`, convex and piecewise linear. Solved
//!   by BB steps along a smoothed subgradient whose smoothing width is
//!   driven toward zero.

mod bb;
mod subgradient;

pub use bb::bb_minimize;
pub use subgradient::l1_minimize;

use ndarray::{Array1, ArrayView1, ShapeBuilder};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{l2_norm, Matrix};

/// Armijo sufficient-decrease constant.
pub const ARMIJO_C: f64 = 1e-4;
/// Backtracking contraction factor.
pub const BACKTRACK_FACTOR: f64 = 0.5;
/// Maximum number of step halvings in one line search.
pub const MAX_BACKTRACKS: usize = 80;
/// Default iteration cap for both solvers.
pub const DEFAULT_MAX_ITER: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectiveKind {
    L2,
    L1,
}

/// One update-step subproblem: the violation objective restricted to `active_set`.
#[derive(Debug, Clone)]
pub struct SubproblemSpec<'a> {
    d: &'a Array1<f64>,
    full_dim: usize,
    active_set: Vec<usize>,
    /// Copy of the active columns of `C`, column-major `m x |L|`.
    c_active: Matrix,
    pub kind: ObjectiveKind,
}

impl<'a> SubproblemSpec<'a> {
    /// `active_set` indexes columns of `c` and must be distinct; it is kept
    /// in the given order, which is also the order of `z_active` vectors.
    pub fn new(c: &Matrix, d: &'a Array1<f64>, active_set: Vec<usize>, kind: ObjectiveKind) -> Result<Self> {
        if c.nrows() != d.len() {
            return Err(Error::dim(format!("C has {} rows but d has length {}", c.nrows(), d.len())));
        }
        let mut sorted = active_set.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != active_set.len() {
            return Err(Error::dim("active set contains duplicate indices"));
        }
        if let Some(&bad) = sorted.last().filter(|&&j| j >= c.ncols()) {
            return Err(Error::dim(format!("active index {bad} out of range for {} columns", c.ncols())));
        }
        let mut c_active = Matrix::zeros((c.nrows(), active_set.len()).f());
        for (k, &j) in active_set.iter().enumerate() {
            c_active.column_mut(k).assign(&c.column(j));
        }
        Ok(SubproblemSpec { d, full_dim: c.ncols(), active_set, c_active, kind })
    }

    pub fn active_set(&self) -> &[usize] {
        &self.active_set
    }

    pub fn active_len(&self) -> usize {
        self.active_set.len()
    }

    pub fn d(&self) -> &Array1<f64> {
        self.d
    }

    /// `C_L z + d`.
    pub fn residual(&self, z_active: ArrayView1<f64>) -> Array1<f64> {
        let mut r = self.apply(z_active);
        r += self.d;
        r
    }

    /// `C_L z`, accumulated column by column (contiguous in column-major).
    pub fn apply(&self, z_active: ArrayView1<f64>) -> Array1<f64> {
        let mut out = Array1::zeros(self.c_active.nrows());
        for (col, &zk) in self.c_active.columns().into_iter().zip(z_active.iter()) {
            if zk != 0.0 {
                out.scaled_add(zk, &col);
            }
        }
        out
    }

    /// Scatters active coordinates into a reduced vector of length `n - 1`.
    pub fn scatter(&self, z_active: ArrayView1<f64>) -> Array1<f64> {
        let mut z = Array1::zeros(self.full_dim);
        for (&j, &v) in self.active_set.iter().zip(z_active.iter()) {
            z[j] = v;
        }
        z
    }

    /// Objective selected by `kind`.
    pub fn objective(&self, z_active: ArrayView1<f64>) -> f64 {
        match self.kind {
            ObjectiveKind::L2 => objective_l2(z_active, self),
            ObjectiveKind::L1 => objective_l1(z_active, self),
        }
    }

    fn check(&self, z_active: ArrayView1<f64>) -> Result<()> {
        if z_active.len() != self.active_len() {
            return Err(Error::dim(format!(
                "z has length {} but the active set has {} indices",
                z_active.len(),
                self.active_len()
            )));
        }
        Ok(())
    }

    /// `C_L^T v`.
    pub(crate) fn transpose_apply(&self, v: &Array1<f64>) -> Array1<f64> {
        self.c_active.columns().into_iter().map(|col| col.dot(v)).collect()
    }
}

/// Outcome of an inner solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverReport {
    /// Reduced vector of length `n - 1`, zero outside the active set.
    #[serde(serialize_with = "crate::model::serialize_vector")]
    pub z: Array1<f64>,
    /// The same vector restricted to the active set, in active-set order.
    #[serde(serialize_with = "crate::model::serialize_vector")]
    pub z_active: Array1<f64>,
    pub objective_value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Final gradient norm (L2) or subgradient norm (L1).
    pub grad_norm_final: f64,
}

/// Default gradient-norm tolerance for the L2 solver.
pub fn default_l2_tol(d: &Array1<f64>) -> f64 {
    1e-10 * d.dot(d).max(1.0)
}

/// Default objective tolerance for the L1 solver.
pub fn default_l1_tol(d: &Array1<f64>) -> f64 {
    1e-12 * d.iter().map(|v| v.abs()).sum::<f64>().max(1.0)
}

/// `||(C_L z + d)_-||_2^2`.
pub fn objective_l2(z_active: ArrayView1<f64>, spec: &SubproblemSpec) -> f64 {
    spec.residual(z_active).iter().map(|r| if *r < 0.0 { r * r } else { 0.0 }).sum()
}

/// `||(C_L z + d)_-||_1`.
pub fn objective_l1(z_active: ArrayView1<f64>, spec: &SubproblemSpec) -> f64 {
    spec.residual(z_active).iter().map(|r| if *r < 0.0 { -r } else { 0.0 }).sum()
}

/// `2 C_L^T (C_L z + d)_-`.
pub fn gradient_l2(z_active: ArrayView1<f64>, spec: &SubproblemSpec) -> Array1<f64> {
    let truncated = spec.residual(z_active).mapv(|r| 2.0 * r.min(0.0));
    spec.transpose_apply(&truncated)
}

/// [`objective_l2`] and [`gradient_l2`] from one residual evaluation.
pub(crate) fn value_and_gradient_l2(z_active: ArrayView1<f64>, spec: &SubproblemSpec) -> (f64, Array1<f64>) {
    let truncated = spec.residual(z_active).mapv(|r| r.min(0.0));
    let f = truncated.iter().map(|r| r * r).sum();
    (f, spec.transpose_apply(&(truncated * 2.0)))
}

/// `C_L^T sign((C_L z + d)_-)` with `sign(0) = 0`.
pub fn subgradient_l1(z_active: ArrayView1<f64>, spec: &SubproblemSpec) -> Array1<f64> {
    let signs = spec.residual(z_active).mapv(|r| if r < 0.0 { -1.0 } else { 0.0 });
    spec.transpose_apply(&signs)
}

pub(crate) fn ensure_finite(v: f64, what: &'static str, iteration: usize) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Numeric { what, iteration })
    }
}

pub(crate) fn ensure_finite_vec(v: &Array1<f64>, what: &'static str, iteration: usize) -> Result<()> {
    ensure_finite(l2_norm(v.view()), what, iteration)
}

/// Backtracking along `-g` from `alpha0`. Returns the accepted step and the
/// new objective, or `None` if no step met the Armijo condition.
pub(crate) fn armijo_backtrack(
    objective: &impl Fn(ArrayView1<f64>) -> f64,
    z: &Array1<f64>,
    f: f64,
    g: &Array1<f64>,
    alpha0: f64,
) -> Option<(f64, Array1<f64>, f64)> {
    let g_sq = g.dot(g);
    let mut alpha = alpha0;
    for _ in 0..MAX_BACKTRACKS {
        let trial = z - &(g * alpha);
        let f_trial = objective(trial.view());
        if f_trial.is_finite() && f_trial <= f - ARMIJO_C * alpha * g_sq {
            return Some((alpha, trial, f_trial));
        }
        alpha *= BACKTRACK_FACTOR;
    }
    None
}

fn check_init(spec: &SubproblemSpec, z_init: ArrayView1<f64>, tol: f64) -> Result<()> {
    spec.check(z_init)?;
    if !(tol > 0.0) {
        return Err(Error::Config(format!("solver tolerance must be positive, got {tol}")));
    }
    Ok(())
}
