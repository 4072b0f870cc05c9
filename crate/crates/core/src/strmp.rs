//! Sign truncated matching pursuit.
//!
//! After picking the pivot `j0` and building the reduced problem `(C, d)`,
//! each iteration
//!
//! 1. forms the proxy `h = C^T (C z + d)_-` (or `C^T sign((C z + d)_-)` for
//!    the l1 variant),
//! 2. adds the unselected index with the largest `|h_i|` to the support,
//! 3. re-solves the violation-minimization subproblem on the enlarged
//!    support, warm-started from the previous `z`.
//!
//! The loop ends once `||(C z + d)_-||_2^2 < epsilon` or the support holds
//! `s` indices (including `j0`). The reduced solution is lifted back to
//! `R^n` by solving for the pivot coordinate and returned both raw and
//! normalized.

use std::time::Instant;

use ndarray::{Array1, ArrayView1};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{l2_norm, largest_magnitude_indices, numerical_support, Matrix};
use crate::recovery::{Algorithm, RecoveryResult, StopReason, TraceEntry};
use crate::reduction::{build_reduced_problem, lift_solution, select_first_index, ReducedProblem};
use crate::solvers::{
    bb_minimize, default_l1_tol, default_l2_tol, l1_minimize, ObjectiveKind, SubproblemSpec, DEFAULT_MAX_ITER,
};

/// Default relative margin for the update subproblem.
pub const DEFAULT_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrmpConfig {
    /// Sparsity budget; the output has at most `s` nonzeros.
    pub s: usize,
    pub c0: f64,
    /// Squared-residual tolerance. `None` means `1e-18 * c0^2 / m`.
    pub epsilon: Option<f64>,
    pub variant: ObjectiveKind,
    pub atoms_per_iteration: usize,
    /// Inner tolerance. `None` picks the solver default for the variant.
    pub solver_tol: Option<f64>,
    pub solver_max_iter: usize,
    /// Relative margin: update steps target `C z + d >= margin * c0 / m`
    /// instead of `>= 0`, so that a zero violation is strict and survives
    /// rounding when lifted back to `sign(A x)`. Zero gives the unshifted
    /// subproblem.
    pub margin: f64,
}

impl StrmpConfig {
    pub fn new(s: usize) -> Self {
        StrmpConfig {
            s,
            c0: 1.0,
            epsilon: None,
            variant: ObjectiveKind::L2,
            atoms_per_iteration: 1,
            solver_tol: None,
            solver_max_iter: DEFAULT_MAX_ITER,
            margin: DEFAULT_MARGIN,
        }
    }

    pub fn l1(s: usize) -> Self {
        StrmpConfig { variant: ObjectiveKind::L1, ..Self::new(s) }
    }

    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = c0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 {
            return Err(Error::Config("sparsity budget s must be at least 1".into()));
        }
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(Error::Config(format!("c0 must be positive, got {}", self.c0)));
        }
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0) {
                return Err(Error::Config(format!("epsilon must be positive, got {eps}")));
            }
        }
        if let Some(tol) = self.solver_tol {
            if !(tol > 0.0) {
                return Err(Error::Config(format!("solver tolerance must be positive, got {tol}")));
            }
        }
        if self.atoms_per_iteration == 0 {
            return Err(Error::Config("atoms_per_iteration must be at least 1".into()));
        }
        if !(self.margin >= 0.0 && self.margin < 1.0) {
            return Err(Error::Config(format!("margin must lie in [0, 1), got {}", self.margin)));
        }
        if self.solver_max_iter == 0 {
            return Err(Error::Config("solver_max_iter must be at least 1".into()));
        }
        Ok(())
    }

    /// The squared-residual tolerance used for an `m`-row problem.
    pub fn epsilon_for(&self, m: usize) -> f64 {
        self.epsilon.unwrap_or(1e-18 * self.c0 * self.c0 / m as f64)
    }
}

/// Proxy vector over the reduced coordinates.
pub fn match_step(z: ArrayView1<f64>, rp: &ReducedProblem, variant: ObjectiveKind) -> Array1<f64> {
    proxy_from_residual(&rp.residual(z), rp, variant)
}

/// `C^T w` where `w` is the truncated residual (or its sign). Only violated
/// rows contribute, so the cost falls as the residual approaches feasibility.
fn proxy_from_residual(r: &Array1<f64>, rp: &ReducedProblem, variant: ObjectiveKind) -> Array1<f64> {
    let weights: Vec<(usize, f64)> = r
        .iter()
        .enumerate()
        .filter(|(_, v)| **v < 0.0)
        .map(|(i, &v)| match variant {
            ObjectiveKind::L2 => (i, v),
            ObjectiveKind::L1 => (i, -1.0),
        })
        .collect();
    rp.c.columns().into_iter().map(|col| weights.iter().map(|&(i, w)| col[i] * w).sum()).collect()
}

/// The `k_atoms` indices with the largest nonzero `|h_i|` outside
/// `forbidden`. `None` signals stagnation: `h` vanishes on every allowed index.
pub fn identify_step(h: ArrayView1<f64>, forbidden: &[bool], k_atoms: usize) -> Option<Vec<usize>> {
    let picked: Vec<usize> = largest_magnitude_indices(h, k_atoms, |i| !forbidden.get(i).copied().unwrap_or(false))
        .into_iter()
        .filter(|&i| h[i] != 0.0)
        .collect();
    if picked.is_empty() {
        None
    } else {
        Some(picked)
    }
}

fn check_signs(a: &Matrix, y: &Array1<f64>) -> Result<()> {
    if a.nrows() != y.len() {
        return Err(Error::dim(format!("matrix has {} rows but y has length {}", a.nrows(), y.len())));
    }
    if a.ncols() < 2 {
        return Err(Error::dim("STrMP needs at least two columns"));
    }
    if y.iter().any(|v| *v != 1.0 && *v != -1.0) {
        return Err(Error::dim("y must contain only +1 and -1"));
    }
    Ok(())
}

fn squared_violation(r: &Array1<f64>) -> f64 {
    r.iter().map(|v| if *v < 0.0 { v * v } else { 0.0 }).sum()
}

/// Runs STrMP (or STrMP-l1, per `cfg.variant`) on `(A, y)`.
pub fn run_strmp(a: &Matrix, y: &Array1<f64>, cfg: &StrmpConfig) -> Result<RecoveryResult> {
    cfg.validate()?;
    check_signs(a, y)?;
    let start = Instant::now();
    let m = a.nrows();

    let j0 = select_first_index(a, y)?;
    let rp = build_reduced_problem(a, y, j0, cfg.c0)?;
    let epsilon = cfg.epsilon_for(m);
    let solver_tol = cfg.solver_tol.unwrap_or_else(|| match cfg.variant {
        ObjectiveKind::L2 => default_l2_tol(&rp.d),
        ObjectiveKind::L1 => default_l1_tol(&rp.d),
    });
    // 1^T d = c0, so c0 / m is the mean entry of d.
    let d_target = rp.d.mapv(|v| v - cfg.margin * cfg.c0 / m as f64);

    let mut active: Vec<usize> = Vec::new();
    let mut selected = vec![false; rp.dim()];
    let mut z_active = Array1::<f64>::zeros(0);
    let mut z = Array1::<f64>::zeros(rp.dim());
    let mut r = rp.d.clone();
    let mut residual = squared_violation(&r);
    let mut trace = vec![TraceEntry { indices: vec![j0], residual }];
    let mut total_atoms = 1;
    let mut iterations = 0;
    let stop_reason;

    loop {
        if residual < epsilon {
            stop_reason = StopReason::ResidualBelowTolerance;
            break;
        }
        if total_atoms >= cfg.s {
            stop_reason = StopReason::SparsityBudget;
            break;
        }
        let h = proxy_from_residual(&r, &rp, cfg.variant);
        let k_atoms = cfg.atoms_per_iteration.min(cfg.s - total_atoms);
        let Some(new) = identify_step(h.view(), &selected, k_atoms) else {
            stop_reason = StopReason::Stagnation;
            break;
        };
        iterations += 1;
        for &k in &new {
            selected[k] = true;
        }
        active.extend_from_slice(&new);
        let mut warm = Array1::zeros(active.len());
        warm.slice_mut(ndarray::s![..z_active.len()]).assign(&z_active);

        let spec = SubproblemSpec::new(&rp.c, &d_target, active.clone(), cfg.variant)?;
        let report = match cfg.variant {
            ObjectiveKind::L2 => bb_minimize(&spec, warm.view(), solver_tol, cfg.solver_max_iter)?,
            ObjectiveKind::L1 => l1_minimize(&spec, warm.view(), solver_tol, cfg.solver_max_iter)?,
        };
        z_active = report.z_active;
        z = report.z;
        r = spec.apply(z_active.view()) + &rp.d;
        residual = squared_violation(&r);
        total_atoms += new.len();
        trace.push(TraceEntry { indices: new.iter().map(|&k| rp.original_index(k)).collect(), residual });
    }

    let x_raw = lift_solution(z.view(), &rp, a, y)?;
    let norm = l2_norm(x_raw.view());
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Numeric { what: "lifted solution norm", iteration: iterations });
    }
    let x_unit = &x_raw / norm;
    let support = numerical_support(x_raw.view());
    let algorithm = match cfg.variant {
        ObjectiveKind::L2 => Algorithm::Strmp,
        ObjectiveKind::L1 => Algorithm::StrmpL1,
    };
    Ok(RecoveryResult {
        algorithm,
        x_raw,
        x_unit,
        support,
        iterations,
        final_residual: residual,
        per_iteration_trace: trace,
        wall_time: start.elapsed().as_secs_f64(),
        converged: stop_reason == StopReason::ResidualBelowTolerance,
        stop_reason,
    })
}
