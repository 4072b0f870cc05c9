//! Common result type and a dispatcher over the recovery algorithms.

use std::fmt;
use std::str::FromStr;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::baselines::{run_biht, BihtConfig};
use crate::error::{Error, Result};
use crate::model::Matrix;
use crate::solvers::ObjectiveKind;
use crate::strmp::{run_strmp, StrmpConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "strmp")]
    Strmp,
    #[serde(rename = "strmp-l1")]
    StrmpL1,
    #[serde(rename = "biht")]
    Biht,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Strmp, Algorithm::StrmpL1, Algorithm::Biht];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Strmp => "strmp",
            Algorithm::StrmpL1 => "strmp-l1",
            Algorithm::Biht => "biht",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}` (expected strmp, strmp-l1 or biht)")))
    }
}

/// Why an iterative recovery stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// Squared violation residual fell below the tolerance.
    ResidualBelowTolerance,
    /// The sparsity budget was exhausted.
    SparsityBudget,
    /// The proxy vanished on every unselected index.
    Stagnation,
    /// BIHT reached a sign-consistent iterate.
    Consistent,
    /// Iteration cap reached.
    MaxIterations,
}

/// One outer iteration: the indices added (original coordinates) and the
/// residual after the update.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub indices: Vec<usize>,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryResult {
    pub algorithm: Algorithm,
    /// Estimate before normalization (for STrMP, the lift with `y^T A x = c0`).
    #[serde(serialize_with = "crate::model::serialize_vector")]
    pub x_raw: Array1<f64>,
    #[serde(serialize_with = "crate::model::serialize_vector")]
    pub x_unit: Array1<f64>,
    pub support: Vec<usize>,
    pub iterations: usize,
    pub final_residual: f64,
    pub per_iteration_trace: Vec<TraceEntry>,
    pub wall_time: f64,
    pub converged: bool,
    pub stop_reason: StopReason,
}

impl RecoveryResult {
    /// Indices chosen at each iteration, flattened.
    pub fn chosen_indices(&self) -> Vec<usize> {
        self.per_iteration_trace.iter().flat_map(|t| t.indices.iter().copied()).collect()
    }
}

/// Per-call options shared by the command line and the experiment harness.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryOptions {
    pub s: usize,
    pub c0: f64,
    pub epsilon: Option<f64>,
    pub atoms_per_iteration: usize,
    pub solver_tol: Option<f64>,
    pub solver_max_iter: usize,
    pub margin: f64,
    pub biht_step: Option<f64>,
    pub biht_max_iter: usize,
}

impl RecoveryOptions {
    pub fn new(s: usize) -> Self {
        let strmp = StrmpConfig::new(s);
        let biht = BihtConfig::new(s);
        RecoveryOptions {
            s,
            c0: strmp.c0,
            epsilon: strmp.epsilon,
            atoms_per_iteration: strmp.atoms_per_iteration,
            solver_tol: strmp.solver_tol,
            solver_max_iter: strmp.solver_max_iter,
            margin: strmp.margin,
            biht_step: biht.step_size,
            biht_max_iter: biht.max_iter,
        }
    }

    pub fn strmp_config(&self, variant: ObjectiveKind) -> StrmpConfig {
        StrmpConfig {
            s: self.s,
            c0: self.c0,
            epsilon: self.epsilon,
            variant,
            atoms_per_iteration: self.atoms_per_iteration,
            solver_tol: self.solver_tol,
            solver_max_iter: self.solver_max_iter,
            margin: self.margin,
        }
    }

    pub fn biht_config(&self) -> BihtConfig {
        BihtConfig { s: self.s, step_size: self.biht_step, max_iter: self.biht_max_iter, halt_on_consistency: true }
    }
}

/// Runs `algorithm` on `(A, y)`.
pub fn recover(algorithm: Algorithm, a: &Matrix, y: &Array1<f64>, opts: &RecoveryOptions) -> Result<RecoveryResult> {
    match algorithm {
        Algorithm::Strmp => run_strmp(a, y, &opts.strmp_config(ObjectiveKind::L2)),
        Algorithm::StrmpL1 => run_strmp(a, y, &opts.strmp_config(ObjectiveKind::L1)),
        Algorithm::Biht => run_biht(a, y, &opts.biht_config()),
    }
}
