//! Binary iterative hard thresholding (BIHT), the comparison baseline.

use std::time::Instant;

use ndarray::{Array1, ArrayView1};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{l2_norm, largest_magnitude_indices, numerical_support, sign_measure, Matrix};
use crate::recovery::{Algorithm, RecoveryResult, StopReason, TraceEntry};

pub const DEFAULT_BIHT_MAX_ITER: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BihtConfig {
    pub s: usize,
    /// Step `tau`; `None` means `1 / m`.
    pub step_size: Option<f64>,
    pub max_iter: usize,
    pub halt_on_consistency: bool,
}

impl BihtConfig {
    pub fn new(s: usize) -> Self {
        BihtConfig { s, step_size: None, max_iter: DEFAULT_BIHT_MAX_ITER, halt_on_consistency: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 {
            return Err(Error::Config("sparsity budget s must be at least 1".into()));
        }
        if let Some(tau) = self.step_size {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(Error::Config(format!("BIHT step size must be positive, got {tau}")));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::Config("BIHT max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Keeps the `s` largest-magnitude entries (ties to the smaller index).
pub fn hard_threshold(x: ArrayView1<f64>, s: usize) -> Array1<f64> {
    let mut out = Array1::zeros(x.len());
    for i in largest_magnitude_indices(x, s, |_| true) {
        out[i] = x[i];
    }
    out
}

fn mismatches(a: &Matrix, x: &Array1<f64>, y: &Array1<f64>) -> (usize, Array1<f64>) {
    let signs = sign_measure(a.dot(x).view());
    let count = signs.iter().zip(y).filter(|(p, q)| p != q).count();
    (count, signs)
}

/// `x <- H_s(x + tau/2 * A^T (y - sign(A x)))`, starting from `H_s(tau * A^T y)`.
///
/// The iterate with the fewest sign mismatches is returned (later iterates
/// win ties), normalized to unit length.
pub fn run_biht(a: &Matrix, y: &Array1<f64>, cfg: &BihtConfig) -> Result<RecoveryResult> {
    cfg.validate()?;
    let (m, n) = a.dim();
    if m != y.len() {
        return Err(Error::dim(format!("matrix has {m} rows but y has length {}", y.len())));
    }
    if cfg.s > n {
        return Err(Error::dim(format!("sparsity s = {} exceeds n = {n}", cfg.s)));
    }
    let start = Instant::now();
    let tau = cfg.step_size.unwrap_or(1.0 / m as f64);

    let mut x = hard_threshold(a.t().dot(y).mapv(|v| v * tau).view(), cfg.s);
    let (mut ham, mut signs) = mismatches(a, &x, y);
    let mut best = (ham, x.clone());
    let mut trace = vec![TraceEntry { indices: Vec::new(), residual: ham as f64 / m as f64 }];
    let mut iterations = 0;

    while iterations < cfg.max_iter && !(cfg.halt_on_consistency && ham == 0) {
        iterations += 1;
        let step = a.t().dot(&(y - &signs)) * (tau / 2.0);
        x = hard_threshold((&x + &step).view(), cfg.s);
        if !l2_norm(x.view()).is_finite() {
            return Err(Error::Numeric { what: "BIHT iterate", iteration: iterations });
        }
        (ham, signs) = mismatches(a, &x, y);
        trace.push(TraceEntry { indices: Vec::new(), residual: ham as f64 / m as f64 });
        if ham <= best.0 {
            best = (ham, x.clone());
        }
    }

    let (best_ham, x_raw) = best;
    let norm = l2_norm(x_raw.view());
    if !(norm > 0.0) {
        return Err(Error::Numeric { what: "BIHT estimate norm", iteration: iterations });
    }
    let x_unit = &x_raw / norm;
    let stop_reason =
        if ham == 0 && cfg.halt_on_consistency { StopReason::Consistent } else { StopReason::MaxIterations };
    Ok(RecoveryResult {
        algorithm: Algorithm::Biht,
        support: numerical_support(x_raw.view()),
        x_raw,
        x_unit,
        iterations,
        final_residual: best_ham as f64 / m as f64,
        per_iteration_trace: trace,
        wall_time: start.elapsed().as_secs_f64(),
        converged: best_ham == 0,
        stop_reason,
    })
}
