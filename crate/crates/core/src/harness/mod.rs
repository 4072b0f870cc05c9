//! Monte Carlo experiment engine.
//!
//! A sweep runs every configured algorithm on `trials` random instances at
//! each sweep point and emits one [`MetricsRecord`] per (point, trial,
//! algorithm). Trial `t` uses seed `derive_seed(base_seed, t)` at every
//! point, so instances can be replayed one at a time. Rows are sorted by
//! (sweep value, trial, algorithm) before writing, which makes the output
//! independent of the worker count.

mod aggregate;
mod config;
mod first_index;
mod output;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

pub use aggregate::{aggregate, AggregateRow};
pub use config::{ExperimentConfig, SweepKind, PAPER_N, PAPER_TRIALS};
pub use first_index::{run_first_index_study, write_first_index_csv, FirstIndexRow};
pub use output::{write_aggregate_csv, write_metadata, write_rows_csv, Metadata};

use crate::error::{Error, Result};
use crate::metrics::MetricsRecord;
use crate::model::{derive_seed, Instance};
use crate::recovery::{recover, RecoveryOptions};

/// Which figure family a sweep feeds. All three emit the same columns; they
/// differ in whether wall time is recorded and in the worker count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    Accuracy,
    Consistency,
    Speed,
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::Accuracy => "accuracy",
            Study::Consistency => "consistency",
            Study::Speed => "speed",
        }
    }

    /// Only speed sweeps record wall time unless the config says otherwise;
    /// a zero `wall_time` column keeps the other CSVs reproducible.
    pub fn records_time(self, cfg: &ExperimentConfig) -> bool {
        cfg.timing.unwrap_or(self == Study::Speed)
    }
}

impl std::str::FromStr for Study {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "accuracy" => Ok(Study::Accuracy),
            "consistency" => Ok(Study::Consistency),
            "speed" => Ok(Study::Speed),
            other => Err(Error::Config(format!("unknown study `{other}`"))),
        }
    }
}

/// One emitted row with its canonical sort key.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub point: usize,
    pub sweep_value: f64,
    pub trial: usize,
    pub record: MetricsRecord,
    /// The recovery or instance error, if the trial failed.
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub study: Study,
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<AggregateRow>,
}

fn run_trial(cfg: &ExperimentConfig, point: usize, trial: usize, timed: bool) -> Vec<SweepRow> {
    let (m, s) = cfg.points()[point];
    let sweep_value = cfg.sweep_values[point];
    let seed = derive_seed(cfg.base_seed, trial as u64);
    let opts = RecoveryOptions::new(s);
    let instance = Instance::generate(m, cfg.n, s, seed);

    cfg.algorithms
        .iter()
        .map(|&alg| {
            let outcome = instance.as_ref().map_err(|e| e.to_string()).and_then(|inst| {
                let (a, y) = (inst.ensemble.a(), inst.ensemble.y());
                let start = Instant::now();
                let result = recover(alg, a, y, &opts).map_err(|e| e.to_string())?;
                let elapsed = start.elapsed().as_secs_f64();
                let wall_time = if timed { elapsed } else { 0.0 };
                MetricsRecord::evaluate(
                    alg,
                    result.x_unit.view(),
                    inst.signal.values().view(),
                    a,
                    y.view(),
                    s,
                    seed,
                    wall_time,
                )
                .map_err(|e| e.to_string())
            });
            let (record, error) = match outcome {
                Ok(r) => (r, None),
                Err(e) => (MetricsRecord::failed(alg, m, cfg.n, s, seed), Some(e)),
            };
            SweepRow { point, sweep_value, trial, record, error }
        })
        .collect()
}

/// Runs `study` on a pool of `workers` threads and aggregates the rows.
pub fn run_sweep(study: Study, cfg: &ExperimentConfig, workers: usize) -> Result<SweepOutput> {
    cfg.validate()?;
    let timed = study.records_time(cfg);
    let tasks: Vec<(usize, usize)> =
        (0..cfg.sweep_values.len()).flat_map(|p| (0..cfg.trials).map(move |t| (p, t))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let mut rows: Vec<SweepRow> =
        pool.install(|| tasks.par_iter().flat_map_iter(|&(p, t)| run_trial(cfg, p, t, timed)).collect());
    rows.sort_by_key(|r| (r.point, r.trial, r.record.algorithm));
    let aggregates = aggregate(cfg, &rows);
    Ok(SweepOutput { study, rows, aggregates })
}

/// SNR, support and sign metrics over the sweep; `cfg.workers` threads.
pub fn run_accuracy_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    run_sweep(Study::Accuracy, cfg, cfg.workers)
}

/// Same rows as the accuracy sweep; the aggregate's Hamming columns are the
/// figure of interest.
pub fn run_consistency_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    run_sweep(Study::Consistency, cfg, cfg.workers)
}

/// Times each recovery call alone (no generation or metrics) on a single
/// worker, whatever `cfg.workers` says, so trials do not compete for cores.
pub fn run_speed_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    run_sweep(Study::Speed, cfg, 1)
}

/// Runs `study` and writes the row CSV, the aggregate CSV and a metadata
/// JSON file next to `cfg.output_path`.
pub fn run_and_write(study: Study, cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let out = match study {
        Study::Accuracy => run_accuracy_sweep(cfg)?,
        Study::Consistency => run_consistency_sweep(cfg)?,
        Study::Speed => run_speed_sweep(cfg)?,
    };
    if let Some(dir) = cfg.output_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_rows_csv(std::fs::File::create(&cfg.output_path)?, &out.rows)?;
    write_aggregate_csv(std::fs::File::create(cfg.companion_path("aggregate.csv"))?, &out.aggregates)?;
    let meta = Metadata::new(study, cfg);
    write_metadata(std::fs::File::create(cfg.companion_path("meta.json"))?, &meta)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recovery::Algorithm;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            n: 30,
            sweep_values: vec![1.0, 2.0],
            s: Some(3),
            trials: 3,
            ..ExperimentConfig::fixed_sparsity(false)
        }
    }

    #[test]
    fn rows_are_canonically_ordered() {
        let out = run_accuracy_sweep(&small()).unwrap();
        assert_eq!(out.rows.len(), 2 * 3 * 3);
        let keys: Vec<_> = out.rows.iter().map(|r| (r.point, r.trial, r.record.algorithm)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(out.rows.iter().all(|r| r.record.wall_time == 0.0 && r.error.is_none()));
        assert_eq!(out.rows[0].record.m, 30);
        assert_eq!(out.rows.last().unwrap().record.m, 60);
    }

    #[test]
    fn trial_seeds_repeat_across_points() {
        let out = run_accuracy_sweep(&small()).unwrap();
        let seeds = |p: usize| -> Vec<u64> {
            out.rows
                .iter()
                .filter(|r| r.point == p && r.record.algorithm == Algorithm::Strmp)
                .map(|r| r.record.trial_seed)
                .collect()
        };
        assert_eq!(seeds(0), seeds(1));
        assert_eq!(seeds(0)[1], derive_seed(0, 1));
    }

    #[test]
    fn worker_count_does_not_change_rows() {
        let cfg = small();
        let one = run_sweep(Study::Accuracy, &cfg, 1).unwrap();
        let four = run_sweep(Study::Accuracy, &cfg, 4).unwrap();
        assert_eq!(one.rows, four.rows);
    }

    #[test]
    fn speed_sweep_records_time() {
        let cfg = ExperimentConfig { algorithms: vec![Algorithm::Strmp], ..small() };
        let out = run_speed_sweep(&cfg).unwrap();
        assert!(out.rows.iter().all(|r| r.record.wall_time > 0.0 && r.record.wall_time.is_finite()));
    }
}
