//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::recovery::Algorithm;

/// Problem size of the full-fidelity experiments.
pub const PAPER_N: usize = 1000;
/// Trials per sweep point of the full-fidelity experiments.
pub const PAPER_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Sweep `m / n` with `s` fixed.
    MOverN,
    /// Sweep `s` with `m` fixed.
    Sparsity,
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepKind::MOverN => "m_over_n",
            SweepKind::Sparsity => "sparsity",
        })
    }
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "m_over_n" => Ok(SweepKind::MOverN),
            "sparsity" => Ok(SweepKind::Sparsity),
            other => Err(Error::Config(format!("unknown sweep `{other}` (expected m_over_n or sparsity)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub sweep: SweepKind,
    pub sweep_values: Vec<f64>,
    /// Fixed sparsity of an `m_over_n` sweep.
    pub s: Option<usize>,
    /// Fixed measurement count of a `sparsity` sweep.
    pub m: Option<usize>,
    pub trials: usize,
    pub base_seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub output_path: PathBuf,
    pub workers: usize,
    /// Record wall time per trial. `None` lets the study decide.
    pub timing: Option<bool>,
}

impl ExperimentConfig {
    /// Fixed `s = 10`, `m / n` swept. Desk scale: `n = 200`, four ratios,
    /// 25 trials. Paper scale: `n = 1000`, `m / n = 0.05, 0.10, ..., 2`,
    /// 100 trials.
    pub fn fixed_sparsity(paper_scale: bool) -> Self {
        let base = ExperimentConfig {
            n: 200,
            sweep: SweepKind::MOverN,
            sweep_values: vec![0.25, 0.5, 1.0, 2.0],
            s: Some(10),
            m: None,
            trials: 25,
            base_seed: 0,
            algorithms: Algorithm::ALL.to_vec(),
            output_path: PathBuf::from("results.csv"),
            workers: 1,
            timing: None,
        };
        if paper_scale {
            base.with_paper_scale()
        } else {
            base
        }
    }

    /// Fixed `m = n`, `s` swept. Desk scale: `n = m = 200`, `s = 2..=8`.
    /// Paper scale: `n = m = 1000`, `s = 1..=15`.
    pub fn fixed_measurements(paper_scale: bool) -> Self {
        let base = ExperimentConfig {
            n: 200,
            sweep: SweepKind::Sparsity,
            sweep_values: (2..=8).map(f64::from).collect(),
            s: None,
            m: Some(200),
            trials: 25,
            ..Self::fixed_sparsity(false)
        };
        if paper_scale {
            base.with_paper_scale()
        } else {
            base
        }
    }

    /// Replaces sizes, grid and trial count by the full-fidelity values.
    pub fn with_paper_scale(mut self) -> Self {
        self.n = PAPER_N;
        self.trials = PAPER_TRIALS;
        match self.sweep {
            SweepKind::MOverN => self.sweep_values = (1..=40).map(|k| k as f64 * 0.05).collect(),
            SweepKind::Sparsity => {
                self.m = Some(PAPER_N);
                self.sweep_values = (1..=15).map(f64::from).collect();
            }
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.sweep_values.is_empty() {
            return bad("sweep_values must not be empty".into());
        }
        if self.sweep_values.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("sweep_values must be strictly increasing".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.algorithms.is_empty() {
            return bad("algorithms must not be empty".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        match self.sweep {
            SweepKind::MOverN => {
                let Some(s) = self.s else {
                    return bad("an m_over_n sweep needs a fixed s".into());
                };
                if s == 0 || s > self.n {
                    return bad(format!("s = {s} must satisfy 1 <= s <= n = {}", self.n));
                }
                if let Some(v) = self.sweep_values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                    return bad(format!("m/n ratio {v} must be positive"));
                }
            }
            SweepKind::Sparsity => {
                let Some(m) = self.m else {
                    return bad("a sparsity sweep needs a fixed m".into());
                };
                if m == 0 {
                    return bad("m must be at least 1".into());
                }
                for &v in &self.sweep_values {
                    if !(v >= 1.0 && v.fract() == 0.0 && v <= self.n as f64) {
                        return bad(format!("sparsity {v} must be an integer in 1..={}", self.n));
                    }
                }
            }
        }
        for (m, s) in self.points() {
            if m == 0 {
                return bad(format!("sweep point gives m = 0 (n = {}, s = {s})", self.n));
            }
        }
        Ok(())
    }

    /// `(m, s)` at each sweep value.
    pub fn points(&self) -> Vec<(usize, usize)> {
        self.sweep_values
            .iter()
            .map(|&v| match self.sweep {
                SweepKind::MOverN => ((v * self.n as f64).round() as usize, self.s.unwrap_or(0)),
                SweepKind::Sparsity => (self.m.unwrap_or(0), v as usize),
            })
            .collect()
    }

    /// Sibling of the output file with `suffix` in place of its extension.
    pub fn companion_path(&self, suffix: &str) -> PathBuf {
        let stem = self.output_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        self.output_path.with_file_name(format!("{stem}.{suffix}"))
    }

    /// Parses the `key = value` format. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut sweep = None;
        let mut sweep_values = None;
        let mut s = None;
        let mut m = None;
        let mut trials = None;
        let mut base_seed = 0;
        let mut algorithms = None;
        let mut output_path = None;
        let mut workers = 1;
        let mut timing = None;
        let mut paper_scale = false;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let line_err = |msg: String| Error::Parse { line: lineno + 1, msg };
            let (key, value) =
                line.split_once('=').ok_or_else(|| line_err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let int = |v: &str| v.parse::<u64>().map_err(|e| line_err(format!("{key}: {e}")));
            match key {
                "n" => n = Some(int(value)? as usize),
                "sweep" => sweep = Some(value.parse::<SweepKind>()?),
                "sweep_values" => {
                    let vals = value
                        .split(',')
                        .map(|v| v.trim().parse::<f64>().map_err(|e| line_err(format!("sweep_values: {e}"))))
                        .collect::<Result<Vec<_>>>()?;
                    sweep_values = Some(vals);
                }
                "s" => s = Some(int(value)? as usize),
                "m" => m = Some(int(value)? as usize),
                "trials" => trials = Some(int(value)? as usize),
                "base_seed" => base_seed = int(value)?,
                "algorithms" => {
                    algorithms = Some(value.split(',').map(|a| a.parse::<Algorithm>()).collect::<Result<Vec<_>>>()?)
                }
                "output" | "output_path" => output_path = Some(PathBuf::from(value)),
                "workers" => workers = int(value)? as usize,
                "timing" => {
                    timing =
                        Some(parse_bool(value).ok_or_else(|| line_err(format!("timing: `{value}` is not a boolean")))?)
                }
                "paper_scale" => {
                    paper_scale =
                        parse_bool(value).ok_or_else(|| line_err(format!("paper_scale: `{value}` is not a boolean")))?
                }
                other => return Err(line_err(format!("unknown key `{other}`"))),
            }
        }

        let missing = |k: &str| Error::Config(format!("missing required key `{k}`"));
        let cfg = ExperimentConfig {
            n: n.ok_or_else(|| missing("n"))?,
            sweep: sweep.ok_or_else(|| missing("sweep"))?,
            sweep_values: sweep_values.ok_or_else(|| missing("sweep_values"))?,
            s,
            m,
            trials: trials.ok_or_else(|| missing("trials"))?,
            base_seed,
            algorithms: algorithms.unwrap_or_else(|| Algorithm::ALL.to_vec()),
            output_path: output_path.ok_or_else(|| missing("output"))?,
            workers,
            timing,
        };
        let cfg = if paper_scale { cfg.with_paper_scale() } else { cfg };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The config in the format accepted by [`ExperimentConfig::parse`].
    pub fn to_config_string(&self) -> String {
        let mut out = format!(
            "n = {}\nsweep = {}\nsweep_values = {}\n",
            self.n,
            self.sweep,
            self.sweep_values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
        );
        if let Some(s) = self.s {
            out += &format!("s = {s}\n");
        }
        if let Some(m) = self.m {
            out += &format!("m = {m}\n");
        }
        out += &format!(
            "trials = {}\nbase_seed = {}\nalgorithms = {}\noutput = {}\nworkers = {}\n",
            self.trials,
            self.base_seed,
            self.algorithms.iter().map(|a| a.name()).collect::<Vec<_>>().join(", "),
            self.output_path.display(),
            self.workers
        );
        if let Some(t) = self.timing {
            out += &format!("timing = {t}\n");
        }
        out
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# accuracy at desk scale
n = 200
sweep = m_over_n
sweep_values = 0.25, 0.5, 1, 2
s = 10
trials = 25
base_seed = 7
algorithms = strmp, biht
output = out/accuracy.csv
workers = 4
";

    #[test]
    fn parses_sample() {
        let cfg = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.n, 200);
        assert_eq!(cfg.sweep, SweepKind::MOverN);
        assert_eq!(cfg.sweep_values, vec![0.25, 0.5, 1.0, 2.0]);
        assert_eq!(cfg.algorithms, vec![Algorithm::Strmp, Algorithm::Biht]);
        assert_eq!(cfg.points(), vec![(50, 10), (100, 10), (200, 10), (400, 10)]);
        assert_eq!(cfg.companion_path("aggregate.csv"), PathBuf::from("out/accuracy.aggregate.csv"));
        assert_eq!(cfg.timing, None);
    }

    #[test]
    fn round_trips_through_text() {
        let cfg = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(ExperimentConfig::parse(&cfg.to_config_string()).unwrap(), cfg);
        let other = ExperimentConfig { timing: Some(true), ..ExperimentConfig::fixed_measurements(false) };
        assert_eq!(ExperimentConfig::parse(&other.to_config_string()).unwrap(), other);
    }

    #[test]
    fn rejects_invalid_configs() {
        let with = |extra: &str| ExperimentConfig::parse(&format!("{SAMPLE}{extra}\n"));
        assert!(with("sweep_values = 1, 0.5").is_err());
        assert!(with("sweep_values = 1, 1").is_err());
        assert!(with("trials = 0").is_err());
        assert!(with("workers = 0").is_err());
        assert!(with("bogus = 1").is_err());
        assert!(with("algorithms = omp").is_err());
        assert!(matches!(with("trials = many"), Err(Error::Parse { line: 11, .. })));
        assert!(
            ExperimentConfig::parse("n = 10\nsweep = sparsity\nsweep_values = 1,2\ntrials = 1\noutput = x").is_err()
        );
        assert!(ExperimentConfig::parse("n = 10\nsweep = sparsity\nsweep_values = 1.5\nm = 5\ntrials = 1\noutput = x")
            .is_err());
    }

    #[test]
    fn paper_scale_grid() {
        let cfg = ExperimentConfig::parse(&format!("{SAMPLE}paper_scale = true\n")).unwrap();
        assert_eq!(cfg.n, 1000);
        assert_eq!(cfg.trials, 100);
        assert_eq!(cfg.sweep_values.len(), 40);
        assert_eq!(cfg.points()[0], (50, 10));
        assert_eq!(cfg.points()[39], (2000, 10));
        let by_s = ExperimentConfig::fixed_measurements(true);
        assert_eq!(by_s.m, Some(1000));
        assert_eq!(by_s.points().last(), Some(&(1000, 15)));
        by_s.validate().unwrap();
    }
}
