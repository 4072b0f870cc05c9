use serde::Serialize;

use super::{ExperimentConfig, SweepRow};
use crate::recovery::Algorithm;

/// Summary of one (sweep value, algorithm) cell.
///
/// SNR means skip infinite values (exact recoveries, counted in `n_exact`)
/// and failed trials. `snr_mean_consistent` further keeps only trials with
/// zero Hamming error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub sweep_value: f64,
    pub algorithm: Algorithm,
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub trials: usize,
    pub n_failed: usize,
    pub n_exact: usize,
    pub n_consistent: usize,
    pub snr_mean: f64,
    pub snr_mean_consistent: f64,
    pub snr_median: f64,
    pub missed_mean: f64,
    pub misidentified_mean: f64,
    pub hamming_mean: f64,
    pub hamming_median: f64,
    pub l2_error_mean: f64,
    pub l2_error_median: f64,
    pub time_mean: f64,
    pub time_std: f64,
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Sample standard deviation; NaN below two values.
fn std_dev(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return f64::NAN;
    }
    let mu = mean(v);
    (v.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Median of the non-NaN values; infinities take part in the ordering.
pub(crate) fn median(v: &[f64]) -> f64 {
    let mut s: Vec<f64> = v.iter().copied().filter(|x| !x.is_nan()).collect();
    if s.is_empty() {
        return f64::NAN;
    }
    s.sort_by(f64::total_cmp);
    let k = s.len();
    if k % 2 == 1 {
        s[k / 2]
    } else {
        (s[k / 2 - 1] + s[k / 2]) / 2.0
    }
}

/// Cells in sweep order, then in the configured algorithm order.
pub fn aggregate(cfg: &ExperimentConfig, rows: &[SweepRow]) -> Vec<AggregateRow> {
    let points = cfg.points();
    let mut out = Vec::new();
    for (p, &(m, s)) in points.iter().enumerate() {
        for &alg in &cfg.algorithms {
            let cell: Vec<&SweepRow> = rows.iter().filter(|r| r.point == p && r.record.algorithm == alg).collect();
            let ok: Vec<&SweepRow> = cell.iter().copied().filter(|r| r.error.is_none()).collect();
            let col = |f: fn(&SweepRow) -> f64| ok.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let snr = col(|r| r.record.snr_db);
            let finite_snr: Vec<f64> = snr.iter().copied().filter(|v| v.is_finite()).collect();
            let consistent_snr: Vec<f64> = ok
                .iter()
                .filter(|r| r.record.hamming_error == 0.0 && r.record.snr_db.is_finite())
                .map(|r| r.record.snr_db)
                .collect();
            let hamming = col(|r| r.record.hamming_error);
            let l2 = col(|r| r.record.l2_error_unit);
            let time = col(|r| r.record.wall_time);
            out.push(AggregateRow {
                sweep_value: cfg.sweep_values[p],
                algorithm: alg,
                m,
                n: cfg.n,
                s,
                trials: cell.len(),
                n_failed: cell.len() - ok.len(),
                n_exact: snr.iter().filter(|v| **v == f64::INFINITY).count(),
                n_consistent: hamming.iter().filter(|h| **h == 0.0).count(),
                snr_mean: mean(&finite_snr),
                snr_mean_consistent: mean(&consistent_snr),
                snr_median: median(&snr),
                missed_mean: mean(&col(|r| r.record.missed as f64)),
                misidentified_mean: mean(&col(|r| r.record.misidentified as f64)),
                hamming_mean: mean(&hamming),
                hamming_median: median(&hamming),
                l2_error_mean: mean(&l2),
                l2_error_median: median(&l2),
                time_mean: mean(&time),
                time_std: std_dev(&time),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::MetricsRecord;

    fn row(trial: usize, snr: f64, hamming: f64) -> SweepRow {
        SweepRow {
            point: 0,
            sweep_value: 1.0,
            trial,
            record: MetricsRecord {
                algorithm: Algorithm::Strmp,
                m: 10,
                n: 10,
                s: 2,
                trial_seed: trial as u64,
                snr_db: snr,
                missed: 1,
                misidentified: 0,
                hamming_error: hamming,
                l2_error_unit: 0.5,
                wall_time: trial as f64,
            },
            error: None,
        }
    }

    #[test]
    fn medians_and_spreads() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&[1.0, f64::INFINITY, f64::NAN]), (1.0 + f64::INFINITY) / 2.0);
        assert!(median(&[]).is_nan());
        assert!((std_dev(&[1.0, 2.0, 3.0, 4.0]) - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(std_dev(&[1.0]).is_nan());
    }

    #[test]
    fn infinite_and_failed_trials_are_separated() {
        let cfg = ExperimentConfig {
            n: 10,
            sweep_values: vec![1.0],
            s: Some(2),
            algorithms: vec![Algorithm::Strmp],
            ..ExperimentConfig::fixed_sparsity(false)
        };
        let mut failed = row(3, f64::NAN, f64::NAN);
        failed.record = MetricsRecord::failed(Algorithm::Strmp, 10, 10, 2, 3);
        failed.error = Some("boom".into());
        let rows = vec![row(0, 10.0, 0.0), row(1, f64::INFINITY, 0.0), row(2, 20.0, 0.1), failed];
        let agg = aggregate(&cfg, &rows);
        assert_eq!(agg.len(), 1);
        let a = &agg[0];
        assert_eq!((a.trials, a.n_failed, a.n_exact, a.n_consistent), (4, 1, 1, 2));
        assert_eq!(a.snr_mean, 15.0);
        assert_eq!(a.snr_mean_consistent, 10.0);
        assert_eq!(a.snr_median, 20.0);
        assert!((a.hamming_mean - 0.1 / 3.0).abs() < 1e-15);
        assert_eq!(a.time_mean, 1.0);
        assert_eq!(a.time_std, 1.0);
    }
}
