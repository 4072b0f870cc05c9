use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{derive_seed, Instance};
use crate::reduction::select_first_index;

/// How often `argmax_i |A_i^T y|` lands in the true support at one `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstIndexRow {
    pub m: usize,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
}

/// Trial `t` draws its signal from `derive_seed(base_seed, t)` at every `m`;
/// only the matrix changes between measurement counts.
pub fn run_first_index_study(
    n: usize,
    s: usize,
    m_values: &[usize],
    trials: usize,
    base_seed: u64,
) -> Result<Vec<FirstIndexRow>> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    if m_values.is_empty() || m_values.contains(&0) {
        return Err(Error::Config("m values must be nonempty and positive".into()));
    }
    m_values
        .iter()
        .map(|&m| {
            let hits: Vec<bool> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let inst = Instance::generate(m, n, s, derive_seed(base_seed, t as u64))?;
                    let j0 = select_first_index(inst.ensemble.a(), inst.ensemble.y())?;
                    Ok(inst.signal.support().contains(&j0))
                })
                .collect::<Result<_>>()?;
            let successes = hits.iter().filter(|h| **h).count();
            Ok(FirstIndexRow { m, trials, successes, rate: successes as f64 / trials as f64 })
        })
        .collect()
}

pub fn write_first_index_csv<W: Write>(w: W, rows: &[FirstIndexRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["m", "trials", "successes", "rate"])?;
    for r in rows {
        out.write_record([r.m.to_string(), r.trials.to_string(), r.successes.to_string(), r.rate.to_string()])?;
    }
    out.flush()?;
    Ok(())
}
