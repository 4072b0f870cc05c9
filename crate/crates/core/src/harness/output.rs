use std::io::Write;

use serde::Serialize;

use super::{AggregateRow, ExperimentConfig, Study, SweepRow};
use crate::baselines::DEFAULT_BIHT_MAX_ITER;
use crate::error::Result;
use crate::metrics::format_float;
use crate::model::RNG_ID;
use crate::solvers::DEFAULT_MAX_ITER;
use crate::strmp::DEFAULT_MARGIN;

/// Columns of the per-trial CSV.
pub const ROW_COLUMNS: [&str; 11] = [
    "algorithm",
    "m",
    "n",
    "s",
    "trial_seed",
    "snr_db",
    "missed",
    "misidentified",
    "hamming_error",
    "l2_error_unit",
    "wall_time",
];

pub fn write_rows_csv<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(ROW_COLUMNS)?;
    for row in rows {
        let r = &row.record;
        out.write_record([
            r.algorithm.name().to_string(),
            r.m.to_string(),
            r.n.to_string(),
            r.s.to_string(),
            r.trial_seed.to_string(),
            format_float(r.snr_db),
            r.missed.to_string(),
            r.misidentified.to_string(),
            format_float(r.hamming_error),
            format_float(r.l2_error_unit),
            format_float(r.wall_time),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_aggregate_csv<W: Write>(w: W, rows: &[AggregateRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "sweep_value",
        "algorithm",
        "m",
        "n",
        "s",
        "trials",
        "n_failed",
        "n_exact",
        "n_consistent",
        "snr_mean",
        "snr_mean_consistent",
        "snr_median",
        "missed_mean",
        "misidentified_mean",
        "hamming_mean",
        "hamming_median",
        "l2_error_mean",
        "l2_error_median",
        "time_mean",
        "time_std",
    ])?;
    for a in rows {
        let mut rec = vec![format_float(a.sweep_value), a.algorithm.name().to_string()];
        rec.extend([a.m, a.n, a.s, a.trials, a.n_failed, a.n_exact, a.n_consistent].map(|v| v.to_string()));
        rec.extend(
            [
                a.snr_mean,
                a.snr_mean_consistent,
                a.snr_median,
                a.missed_mean,
                a.misidentified_mean,
                a.hamming_mean,
                a.hamming_median,
                a.l2_error_mean,
                a.l2_error_median,
                a.time_mean,
                a.time_std,
            ]
            .map(format_float),
        );
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Everything needed to rerun a sweep, written next to its CSV.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub crate_version: &'static str,
    pub study: Study,
    pub rng: &'static str,
    pub config: ExperimentConfig,
    pub timing_recorded: bool,
    pub strmp_margin: f64,
    pub strmp_epsilon: &'static str,
    pub solver_max_iter: usize,
    pub biht_step: &'static str,
    pub biht_max_iter: usize,
}

impl Metadata {
    pub fn new(study: Study, cfg: &ExperimentConfig) -> Self {
        Metadata {
            crate_version: env!("CARGO_PKG_VERSION"),
            study,
            rng: RNG_ID,
            config: cfg.clone(),
            timing_recorded: study.records_time(cfg),
            strmp_margin: DEFAULT_MARGIN,
            strmp_epsilon: "1e-18 * c0^2 / m",
            solver_max_iter: DEFAULT_MAX_ITER,
            biht_step: "1 / m",
            biht_max_iter: DEFAULT_BIHT_MAX_ITER,
        }
    }
}

pub fn write_metadata<W: Write>(mut w: W, meta: &Metadata) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, meta).map_err(std::io::Error::from)?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::MetricsRecord;
    use crate::recovery::Algorithm;

    #[test]
    fn row_csv_layout() {
        let mut rec = MetricsRecord::failed(Algorithm::StrmpL1, 40, 20, 3, 9);
        rec.snr_db = f64::INFINITY;
        rec.wall_time = 0.0;
        let rows = [SweepRow { point: 0, sweep_value: 2.0, trial: 0, record: rec, error: None }];
        let mut buf = Vec::new();
        write_rows_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "algorithm,m,n,s,trial_seed,snr_db,missed,misidentified,hamming_error,l2_error_unit,wall_time\n\
             strmp-l1,40,20,3,9,inf,3,0,nan,nan,0\n"
        );
    }

    #[test]
    fn metadata_names_the_rng() {
        let mut buf = Vec::new();
        let cfg = ExperimentConfig::fixed_sparsity(false);
        write_metadata(&mut buf, &Metadata::new(Study::Speed, &cfg)).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rng"], RNG_ID);
        assert_eq!(v["timing_recorded"], true);
        assert_eq!(v["config"]["sweep"], "m_over_n");
    }
}
