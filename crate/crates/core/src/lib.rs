//! One-bit compressed sensing by sign truncated matching pursuit.
//!
//! Recovers an `s`-sparse direction `x` from `y = sign(A x)` with Gaussian
//! `A`. The crate provides
//!
//! * [`strmp`]: the STrMP greedy loop and its l1 variant,
//! * [`reduction`]: pivot selection and the normalization-free reduced problem,
//! * [`solvers`]: the Barzilai-Borwein and subgradient inner solvers,
//! * [`baselines`]: binary iterative hard thresholding,
//! * [`metrics`], [`oracle`] and [`harness`] for evaluation and experiments.
//!
//! ```
//! use obcs::{model::Instance, strmp::{run_strmp, StrmpConfig}};
//!
//! let inst = Instance::generate(400, 100, 4, 7).unwrap();
//! let res = run_strmp(inst.ensemble.a(), inst.ensemble.y(), &StrmpConfig::new(4)).unwrap();
//! assert!(res.support.len() <= 4);
//! ```

// `!(x > 0.0)` also rejects NaN, which is the point of those checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod error;
pub mod harness;
pub mod io;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod recovery;
pub mod reduction;
pub mod solvers;
pub mod strmp;

pub use error::{Error, Result};
pub use recovery::{recover, Algorithm, RecoveryOptions, RecoveryResult};
