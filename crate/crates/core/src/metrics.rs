//! Accuracy and consistency measures for a recovered signal.

use ndarray::ArrayView1;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{l2_norm, numerical_support, sign_measure, Matrix};
use crate::recovery::Algorithm;

/// `10 log10(||x_est||^2 / ||x_est - x_true||^2)`.
///
/// Exact recovery gives `+inf`; a zero estimate gives `-inf`.
pub fn snr(x_est: ArrayView1<f64>, x_true: ArrayView1<f64>) -> Result<f64> {
    if x_est.len() != x_true.len() {
        return Err(Error::dim("snr: vectors differ in length"));
    }
    let signal = x_est.dot(&x_est);
    let diff = &x_est - &x_true;
    let err = diff.dot(&diff);
    Ok(if err == 0.0 {
        f64::INFINITY
    } else if signal == 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * (signal / err).log10()
    })
}

fn supports(x_est: ArrayView1<f64>, x_true: ArrayView1<f64>) -> Result<(Vec<bool>, Vec<bool>)> {
    if x_est.len() != x_true.len() {
        return Err(Error::dim("support comparison: vectors differ in length"));
    }
    let mask = |x: ArrayView1<f64>| {
        let mut m = vec![false; x.len()];
        for i in numerical_support(x) {
            m[i] = true;
        }
        m
    };
    Ok((mask(x_est), mask(x_true)))
}

/// `|{i : x_true_i != 0 and x_est_i = 0}|`.
pub fn missed_count(x_est: ArrayView1<f64>, x_true: ArrayView1<f64>) -> Result<usize> {
    let (est, truth) = supports(x_est, x_true)?;
    Ok(est.iter().zip(&truth).filter(|(e, t)| **t && !**e).count())
}

/// `|{i : x_true_i = 0 and x_est_i != 0}|`.
pub fn misidentified_count(x_est: ArrayView1<f64>, x_true: ArrayView1<f64>) -> Result<usize> {
    let (est, truth) = supports(x_est, x_true)?;
    Ok(est.iter().zip(&truth).filter(|(e, t)| **e && !**t).count())
}

/// Number of rows where `sign(A x) != y` (with `sign(0) = +1`).
pub fn hamming_mismatches(x_est: ArrayView1<f64>, a: &Matrix, y: ArrayView1<f64>) -> Result<usize> {
    if a.ncols() != x_est.len() || a.nrows() != y.len() {
        return Err(Error::dim("hamming_error: dimensions disagree"));
    }
    let signs = sign_measure(a.dot(&x_est).view());
    Ok(signs.iter().zip(y.iter()).filter(|(p, q)| p != q).count())
}

/// `||sign(A x) - y||_0 / m`.
pub fn hamming_error(x_est: ArrayView1<f64>, a: &Matrix, y: ArrayView1<f64>) -> Result<f64> {
    Ok(hamming_mismatches(x_est, a, y)? as f64 / y.len() as f64)
}

/// One output row of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRecord {
    pub algorithm: Algorithm,
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub trial_seed: u64,
    pub snr_db: f64,
    pub missed: usize,
    pub misidentified: usize,
    pub hamming_error: f64,
    pub l2_error_unit: f64,
    pub wall_time: f64,
}

impl MetricsRecord {
    /// Evaluates a unit-norm estimate against a unit-norm truth.
    #[allow(clippy::too_many_arguments)]
    pub fn evaluate(
        algorithm: Algorithm,
        x_unit: ArrayView1<f64>,
        x_true: ArrayView1<f64>,
        a: &Matrix,
        y: ArrayView1<f64>,
        s: usize,
        trial_seed: u64,
        wall_time: f64,
    ) -> Result<Self> {
        Ok(MetricsRecord {
            algorithm,
            m: a.nrows(),
            n: a.ncols(),
            s,
            trial_seed,
            snr_db: snr(x_unit, x_true)?,
            missed: missed_count(x_unit, x_true)?,
            misidentified: misidentified_count(x_unit, x_true)?,
            hamming_error: hamming_error(x_unit, a, y)?,
            l2_error_unit: l2_norm((&x_unit - &x_true).view()),
            wall_time,
        })
    }

    /// Placeholder for a trial whose recovery failed: every metric is NaN
    /// and every count is the worst case.
    pub fn failed(algorithm: Algorithm, m: usize, n: usize, s: usize, trial_seed: u64) -> Self {
        MetricsRecord {
            algorithm,
            m,
            n,
            s,
            trial_seed,
            snr_db: f64::NAN,
            missed: s,
            misidentified: 0,
            hamming_error: f64::NAN,
            l2_error_unit: f64::NAN,
            wall_time: f64::NAN,
        }
    }
}

/// Formats a float for CSV output: `inf`, `-inf`, `nan`, otherwise the
/// shortest round-trip decimal.
pub fn format_float(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v.is_nan() {
        "nan".into()
    } else {
        format!("{v}")
    }
}
