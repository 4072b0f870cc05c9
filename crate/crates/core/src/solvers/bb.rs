use ndarray::{Array1, ArrayView1};

use super::{
    armijo_backtrack, check_init, ensure_finite, ensure_finite_vec, objective_l2, value_and_gradient_l2, SolverReport,
    SubproblemSpec,
};
use crate::error::Result;
use crate::model::l2_norm;

/// Two-point step size gradient method on `||(C_L z + d)_-||_2^2`.
///
/// The first step, and any step where the two-point estimate
/// `s^T y / ||y||^2` is undefined or non-positive, comes from Armijo
/// backtracking starting at `alpha = 1`. Iteration stops once
/// `||grad|| <= tol` or after `max_iter` steps. BB is nonmonotone, so the
/// best iterate seen is returned.
pub fn bb_minimize(spec: &SubproblemSpec, z_init: ArrayView1<f64>, tol: f64, max_iter: usize) -> Result<SolverReport> {
    check_init(spec, z_init, tol)?;
    let run = bb_descent(
        |z| objective_l2(z, spec),
        |z| value_and_gradient_l2(z, spec),
        z_init.to_owned(),
        tol,
        max_iter,
        |_| false,
    )?;
    Ok(SolverReport {
        z: spec.scatter(run.z.view()),
        z_active: run.z,
        objective_value: run.f,
        iterations: run.iterations,
        converged: run.converged,
        grad_norm_final: run.g_norm,
    })
}

/// Best iterate of a [`bb_descent`] run.
pub(crate) struct BbRun {
    pub z: Array1<f64>,
    pub f: f64,
    pub g_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Barzilai-Borwein iteration `z <- z - alpha_k grad(z)` for a C^1 objective.
///
/// `value_and_gradient` must agree with `objective`; the line search only
/// needs values. `on_iterate` sees every accepted iterate and may end the
/// run by returning `true`.
pub(crate) fn bb_descent(
    objective: impl Fn(ArrayView1<f64>) -> f64,
    value_and_gradient: impl Fn(ArrayView1<f64>) -> (f64, Array1<f64>),
    z_init: Array1<f64>,
    tol: f64,
    max_iter: usize,
    mut on_iterate: impl FnMut(&Array1<f64>) -> bool,
) -> Result<BbRun> {
    let mut z = z_init;
    let (mut f, mut g) = value_and_gradient(z.view());
    ensure_finite(f, "objective", 0)?;
    ensure_finite_vec(&g, "gradient", 0)?;
    let mut g_norm = l2_norm(g.view());

    let mut best = (z.clone(), f, g_norm);
    let mut bb_step: Option<f64> = None;
    let mut iterations = 0;
    let mut converged = g_norm <= tol;

    while !converged && iterations < max_iter {
        iterations += 1;
        let z_next = match bb_step {
            Some(alpha) => &z - &(&g * alpha),
            None => match armijo_backtrack(&objective, &z, f, &g, 1.0) {
                Some((_, z_next, _)) => z_next,
                // No decrease along -g at any tested scale: stationary to
                // working precision.
                None => break,
            },
        };
        let (f_next, g_next) = value_and_gradient(z_next.view());
        ensure_finite(f_next, "objective", iterations)?;
        ensure_finite_vec(&g_next, "gradient", iterations)?;

        let step = &z_next - &z;
        let dg = &g_next - &g;
        let sy = step.dot(&dg);
        let yy = dg.dot(&dg);
        bb_step = if sy > 0.0 && yy > 0.0 { Some(sy / yy) } else { None };

        z = z_next;
        f = f_next;
        g = g_next;
        g_norm = l2_norm(g.view());
        if f < best.1 || (f == best.1 && g_norm < best.2) {
            best = (z.clone(), f, g_norm);
        }
        converged = g_norm <= tol;
        if on_iterate(&z) {
            break;
        }
    }

    let (z, f, g_norm) = best;
    Ok(BbRun { converged: converged || g_norm <= tol, z, f, g_norm, iterations })
}
