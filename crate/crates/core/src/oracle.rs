//! Exhaustive reference solvers for small instances.
//!
//! [`brute_force_l0`] answers "what is the sparsest consistent `x` with
//! `y^T A x = c0`" by trying every support up to `s_max` and every pivot in
//! it. [`monte_carlo_expectation`] estimates `E[a_j sign(a^T x)]` for a
//! Gaussian row `a`.

use ndarray::Array1;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{rng_from_seed, Matrix, SparseSignal};
use crate::reduction::{build_reduced_problem, certify_solution, lift_solution, ReducedProblem};
use crate::solvers::{bb_minimize, ObjectiveKind, SubproblemSpec};
use crate::strmp::DEFAULT_MARGIN;

/// Largest `n` accepted by [`brute_force_l0`].
pub const MAX_ORACLE_N: usize = 25;
/// Largest `s_max` accepted by [`brute_force_l0`].
pub const MAX_ORACLE_SPARSITY: usize = 3;
/// A support is feasible when the minimized squared violation is below this.
pub const FEASIBILITY_TOL: f64 = 1e-10;
const SOLVER_TOL: f64 = 1e-12;
const SOLVER_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    /// Lexicographically first feasible support of minimal size.
    pub best_support: Vec<usize>,
    #[serde(serialize_with = "crate::model::serialize_vector")]
    pub best_x: Array1<f64>,
    /// `None` when no support of size `<= s_max` is feasible.
    pub min_sparsity: Option<usize>,
    pub feasible: bool,
    /// Every feasible support of size `min_sparsity`, sorted.
    pub minimal_supports: Vec<Vec<usize>>,
}

impl OracleResult {
    pub fn is_minimal_support(&self, support: &[usize]) -> bool {
        let mut sorted = support.to_vec();
        sorted.sort_unstable();
        self.minimal_supports.contains(&sorted)
    }
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    if k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx)?;
        let Some(p) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            return Ok(());
        };
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Lifted consistent `x` supported on `support` with pivot `rp.j0`, if any.
fn solve_support(
    rp: &ReducedProblem,
    support: &[usize],
    a: &Matrix,
    y: &Array1<f64>,
    c0: f64,
) -> Result<Option<Array1<f64>>> {
    let m = a.nrows();
    let active: Vec<usize> =
        support.iter().filter(|&&j| j != rp.j0).map(|&j| if j < rp.j0 { j } else { j - 1 }).collect();
    let mut z = Array1::zeros(rp.dim());
    if !active.is_empty() {
        let target = rp.d.mapv(|v| v - DEFAULT_MARGIN * c0 / m as f64);
        let spec = SubproblemSpec::new(&rp.c, &target, active.clone(), ObjectiveKind::L2)?;
        let report = bb_minimize(&spec, Array1::zeros(active.len()).view(), SOLVER_TOL, SOLVER_MAX_ITER)?;
        z = report.z;
    }
    let violation: f64 = rp.residual(z.view()).iter().map(|r| r.min(0.0).powi(2)).sum();
    if violation >= FEASIBILITY_TOL {
        return Ok(None);
    }
    let x = lift_solution(z.view(), rp, a, y)?;
    let cert = certify_solution(x.view(), a, y, support.len(), c0)?;
    Ok(cert.consistent.then_some(x))
}

/// Sparsest consistent solution with at most `s_max` nonzeros, by enumeration.
///
/// Each support is tried with every member as the pivot. Feasibility means
/// the L2 violation minimized on that support (against the same margin that
/// STrMP uses) is below `1e-10` and the lifted `x` certifies as consistent.
pub fn brute_force_l0(a: &Matrix, y: &Array1<f64>, s_max: usize, c0: f64) -> Result<OracleResult> {
    let n = a.ncols();
    if n > MAX_ORACLE_N || s_max > MAX_ORACLE_SPARSITY {
        return Err(Error::TooLarge(format!(
            "n = {n}, s_max = {s_max} (limits: n <= {MAX_ORACLE_N}, s_max <= {MAX_ORACLE_SPARSITY})"
        )));
    }
    if s_max == 0 {
        return Err(Error::Config("s_max must be at least 1".into()));
    }
    if a.nrows() != y.len() {
        return Err(Error::dim(format!("matrix has {} rows but y has length {}", a.nrows(), y.len())));
    }
    // A degenerate pivot cannot carry the normalization; skip it.
    let reduced: Vec<Option<ReducedProblem>> = (0..n)
        .map(|j0| match build_reduced_problem(a, y, j0, c0) {
            Ok(rp) => Ok(Some(rp)),
            Err(Error::DegeneratePivot { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;

    for k in 1..=s_max {
        let mut found: Vec<(Vec<usize>, Array1<f64>)> = Vec::new();
        for_each_combination(n, k, |support| {
            for &j0 in support {
                let Some(rp) = &reduced[j0] else { continue };
                if let Some(x) = solve_support(rp, support, a, y, c0)? {
                    found.push((support.to_vec(), x));
                    break;
                }
            }
            Ok(())
        })?;
        if let Some((best_support, best_x)) = found.first().cloned() {
            return Ok(OracleResult {
                best_support,
                best_x,
                min_sparsity: Some(k),
                feasible: true,
                minimal_supports: found.into_iter().map(|(s, _)| s).collect(),
            });
        }
    }
    Ok(OracleResult {
        best_support: Vec::new(),
        best_x: Array1::zeros(n),
        min_sparsity: None,
        feasible: false,
        minimal_supports: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

/// Estimates `E[a_j sign(a^T x)]` with `a ~ N(0, I_n)` from `trials` draws.
///
/// Only the coordinates of `a` on `supp(x) + {j}` enter the product, so
/// only those are drawn. For unit `x` the expectation is `2 x_j / sqrt(2 pi)`.
pub fn monte_carlo_expectation(
    x_true: &SparseSignal,
    j: usize,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if j >= x_true.n() {
        return Err(Error::dim(format!("index {j} out of range for n = {}", x_true.n())));
    }
    if trials < 2 {
        return Err(Error::Config("at least 2 trials are needed for a standard error".into()));
    }
    if (x_true.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("x_true must have unit norm, got {}", x_true.norm())));
    }
    let support = x_true.support();
    let coefs: Vec<f64> = support.iter().map(|&i| x_true.values()[i]).collect();
    let j_pos = support.iter().position(|&i| i == j);

    let mut rng = rng_from_seed(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..trials {
        let mut inner = 0.0;
        let mut a_j = 0.0;
        for (p, &c) in coefs.iter().enumerate() {
            let g: f64 = StandardNormal.sample(&mut rng);
            inner += g * c;
            if Some(p) == j_pos {
                a_j = g;
            }
        }
        if j_pos.is_none() {
            a_j = StandardNormal.sample(&mut rng);
        }
        let v = if inner >= 0.0 { a_j } else { -a_j };
        sum += v;
        sum_sq += v * v;
    }
    let t = trials as f64;
    let mean = sum / t;
    let var = ((sum_sq - t * mean * mean) / (t - 1.0)).max(0.0);
    Ok(MonteCarloEstimate { mean, std_error: (var / t).sqrt(), trials })
}
