//! Shared data types, seeded instance generation, and the sign primitives.
//!
//! Matrices are dense `Array2<f64>` stored column-major, since every hot
//! loop in the recovery algorithms walks columns (`A_i^T y`, `C_i^T r`).
//!
//! Randomness is drawn from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`; normals come from `rand_distr::StandardNormal`
//! (ziggurat). Per-trial seeds are derived with [`derive_seed`], a
//! SplitMix64 mix of the base seed and the trial index.

use ndarray::{Array1, Array2, ArrayView1, ShapeBuilder};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};

/// Dense real matrix, column-major.
pub type Matrix = Array2<f64>;

/// Identity of the random stream, recorded in experiment metadata.
pub const RNG_ID: &str = "chacha8-seed_from_u64/ziggurat-standard-normal/splitmix64-derive";

/// Constructs the seeded generator used everywhere in the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent child seed from `(base, index)`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(splitmix64(base) ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

/// `m x n` matrix of i.i.d. standard normals, filled column by column.
pub fn generate_gaussian_matrix(m: usize, n: usize, seed: u64) -> Matrix {
    let mut rng = rng_from_seed(seed);
    let data: Vec<f64> = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();
    Array2::from_shape_vec((m, n).f(), data).expect("shape matches data length")
}

/// Serializes a vector as a plain sequence of numbers.
pub(crate) fn serialize_vector<S: serde::Serializer>(v: &Array1<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}

/// Ground-truth sparse vector with its support recorded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseSignal {
    #[serde(serialize_with = "crate::model::serialize_vector")]
    values: Array1<f64>,
    support: Vec<usize>,
}

impl SparseSignal {
    /// Builds a signal from a dense vector; the support is the set of
    /// exactly-nonzero entries.
    pub fn from_dense(values: Array1<f64>) -> Self {
        let support = values.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, _)| i).collect();
        SparseSignal { values, support }
    }

    /// Builds a signal from `(index, value)` pairs (0-based indices).
    pub fn from_entries(n: usize, entries: &[(usize, f64)]) -> Result<Self> {
        let mut values = Array1::zeros(n);
        for &(i, v) in entries {
            if i >= n {
                return Err(Error::dim(format!("signal index {i} out of range for n = {n}")));
            }
            values[i] = v;
        }
        Ok(Self::from_dense(values))
    }

    pub fn values(&self) -> &Array1<f64> {
        &self.values
    }

    /// Sorted support indices.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn s(&self) -> usize {
        self.support.len()
    }

    pub fn norm(&self) -> f64 {
        l2_norm(self.values.view())
    }

    /// Returns a copy scaled to unit l2 norm. The zero signal is returned unchanged.
    pub fn normalized(&self) -> Self {
        let norm = self.norm();
        if norm == 0.0 {
            return self.clone();
        }
        SparseSignal { values: &self.values / norm, support: self.support.clone() }
    }
}

/// Draws an `s`-sparse signal: uniformly random support, standard normal
/// nonzeros, optionally normalized to unit l2 norm.
pub fn generate_sparse_signal(n: usize, s: usize, seed: u64, normalize: bool) -> Result<SparseSignal> {
    if s == 0 || s > n {
        return Err(Error::dim(format!("sparsity s = {s} must satisfy 1 <= s <= n = {n}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut support = index::sample(&mut rng, n, s).into_vec();
    support.sort_unstable();
    let mut values = Array1::zeros(n);
    for &i in &support {
        values[i] = rng.sample::<f64, _>(StandardNormal);
    }
    let signal = SparseSignal { values, support };
    Ok(if normalize { signal.normalized() } else { signal })
}

/// Componentwise sign with the measurement convention `sign(0) = +1`.
pub fn sign_measure(v: ArrayView1<f64>) -> Array1<f64> {
    v.mapv(|x| if x < 0.0 { -1.0 } else { 1.0 })
}

/// The sign truncated function `(v)_- = min(v, 0)`, componentwise.
pub fn sign_truncate(v: ArrayView1<f64>) -> Array1<f64> {
    v.mapv(|x| x.min(0.0))
}

pub fn l2_norm(v: ArrayView1<f64>) -> f64 {
    v.dot(&v).sqrt()
}

pub fn linf_norm(v: ArrayView1<f64>) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Relative threshold below which an entry counts as zero in support tests.
pub const ZERO_THRESHOLD: f64 = 1e-12;

/// Indices of entries with `|x_i| > 1e-12 * ||x||_inf`, ascending.
pub fn numerical_support(x: ArrayView1<f64>) -> Vec<usize> {
    let cutoff = ZERO_THRESHOLD * linf_norm(x);
    x.iter().enumerate().filter(|(_, v)| v.abs() > cutoff).map(|(i, _)| i).collect()
}

/// The `k` indices with largest `|values[i]|` among those accepted by
/// `allowed`, ordered by descending magnitude with ascending-index ties.
pub fn largest_magnitude_indices(values: ArrayView1<f64>, k: usize, allowed: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).filter(|&i| allowed(i)).collect();
    idx.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// Sign measurements `y = sign(A x)` together with the matrix that produced them.
#[derive(Debug, Clone)]
pub struct MeasurementEnsemble {
    a: Matrix,
    y: Array1<f64>,
    seed: u64,
}

impl MeasurementEnsemble {
    /// Measures `signal` with `a`.
    pub fn measure(a: Matrix, signal: &SparseSignal, seed: u64) -> Result<Self> {
        if a.ncols() != signal.n() {
            return Err(Error::dim(format!("matrix has {} columns but signal has length {}", a.ncols(), signal.n())));
        }
        let y = sign_measure(a.dot(signal.values()).view());
        Ok(MeasurementEnsemble { a, y, seed })
    }

    /// Wraps externally supplied `(A, y)`; `y` must be a ±1 vector of length `m`.
    pub fn from_parts(a: Matrix, y: Array1<f64>, seed: u64) -> Result<Self> {
        if a.nrows() != y.len() {
            return Err(Error::dim(format!("matrix has {} rows but y has length {}", a.nrows(), y.len())));
        }
        if let Some(bad) = y.iter().find(|v| **v != 1.0 && **v != -1.0) {
            return Err(Error::dim(format!("sign vector entry {bad} is not +1 or -1")));
        }
        Ok(MeasurementEnsemble { a, y, seed })
    }

    /// Gaussian matrix and measurements of `signal`, both derived from `seed`.
    pub fn gaussian(m: usize, signal: &SparseSignal, seed: u64) -> Result<Self> {
        let a = generate_gaussian_matrix(m, signal.n(), seed);
        Self::measure(a, signal, seed)
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn y(&self) -> &Array1<f64> {
        &self.y
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn into_parts(self) -> (Matrix, Array1<f64>) {
        (self.a, self.y)
    }
}

/// A seeded synthetic problem: unit-norm truth plus its Gaussian measurements.
#[derive(Debug, Clone)]
pub struct Instance {
    pub signal: SparseSignal,
    pub ensemble: MeasurementEnsemble,
    pub seed: u64,
}

impl Instance {
    /// Generates the instance for `(m, n, s)` from a single trial seed. The
    /// signal uses `derive_seed(seed, 0)` and the matrix `derive_seed(seed, 1)`.
    pub fn generate(m: usize, n: usize, s: usize, seed: u64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::dim("m and n must be positive"));
        }
        let signal = generate_sparse_signal(n, s, derive_seed(seed, 0), true)?;
        let ensemble = MeasurementEnsemble::gaussian(m, &signal, derive_seed(seed, 1))?;
        Ok(Instance { signal, ensemble, seed })
    }
}
