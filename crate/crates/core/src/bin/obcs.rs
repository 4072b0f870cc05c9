//! Command line front end: instance generation, single recoveries and the
//! experiment sweeps.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use obcs::harness::{run_and_write, run_first_index_study, write_first_index_csv, ExperimentConfig, Study};
use obcs::io::{read_matrix, read_signal, read_signs, write_matrix, write_signal, write_signs};
use obcs::metrics::MetricsRecord;
use obcs::model::{Instance, SparseSignal};
use obcs::oracle::monte_carlo_expectation;
use obcs::reduction::{certify_solution, SolutionCertificate};
use obcs::{recover, Algorithm, Error, RecoveryOptions, RecoveryResult, Result};

#[derive(Parser)]
#[command(name = "obcs", version, about = "One-bit compressed sensing recovery and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random instance and write A, y and the true signal.
    Gen(GenArgs),
    /// Recover a signal from a matrix and sign file; prints one JSON line.
    Recover(RecoverArgs),
    /// Run an accuracy, consistency or speed sweep from a config file.
    Bench(BenchArgs),
    /// Success rate of the first-index rule as m varies.
    FirstIndex(FirstIndexArgs),
    /// Monte Carlo estimate of E[a_1 sign(a^T e_1)] against 2 / sqrt(2 pi).
    ExpectationCheck(ExpectationArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    signs: PathBuf,
    /// Where to write the true signal.
    #[arg(long)]
    signal: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long, value_parser = parse_algorithm)]
    algo: Algorithm,
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    signs: PathBuf,
    /// Sparsity budget. Defaults to the sparsity of --truth, if given.
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    c0: f64,
    /// Squared-residual tolerance (default 1e-18 c0^2 / m).
    #[arg(long)]
    eps: Option<f64>,
    /// True signal; adds SNR, support and Hamming metrics to the output.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Write the JSON line here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(value_parser = parse_study)]
    study: Study,
    #[arg(long)]
    config: PathBuf,
    /// Override the config's worker count.
    #[arg(long)]
    workers: Option<usize>,
    /// Override the config's output path.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Run at full size: n = 1000, the full sweep grid and 100 trials.
    #[arg(long)]
    paper_scale: bool,
}

#[derive(Args)]
struct FirstIndexArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    /// Comma-separated measurement counts.
    #[arg(long, value_delimiter = ',', required = true)]
    m_list: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExpectationArgs {
    #[arg(long, default_value_t = 1_000_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ambient dimension of e_1.
    #[arg(long, default_value_t = 10)]
    n: usize,
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_study(s: &str) -> std::result::Result<Study, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::Config(format!("cannot create {}: {e}", path.display())))
}

fn output_sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn gen(args: GenArgs) -> Result<()> {
    let inst = Instance::generate(args.m, args.n, args.s, args.seed)?;
    write_matrix(create(&args.matrix)?, inst.ensemble.a())?;
    write_signs(create(&args.signs)?, inst.ensemble.y())?;
    if let Some(p) = &args.signal {
        write_signal(create(p)?, &inst.signal)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RecoverOutput<'a> {
    #[serde(flatten)]
    result: &'a RecoveryResult,
    certificate: SolutionCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<MetricsRecord>,
}

fn recover_cmd(args: RecoverArgs) -> Result<()> {
    let a = read_matrix(open(&args.matrix)?)?;
    let y = read_signs(open(&args.signs)?)?;
    let truth: Option<SparseSignal> = args.truth.as_deref().map(|p| read_signal(open(p)?)).transpose()?;
    let s = args
        .s
        .or(truth.as_ref().map(|t| t.s()))
        .ok_or_else(|| Error::Config("--s is required when --truth is not given".into()))?;

    let mut opts = RecoveryOptions::new(s);
    opts.c0 = args.c0;
    opts.epsilon = args.eps;
    let result = recover(args.algo, &a, &y, &opts)?;
    let certificate = certify_solution(result.x_raw.view(), &a, &y, s, args.c0)?;
    let metrics = truth
        .map(|t| {
            let unit = t.normalized();
            MetricsRecord::evaluate(
                args.algo,
                result.x_unit.view(),
                unit.values().view(),
                &a,
                y.view(),
                s,
                0,
                result.wall_time,
            )
        })
        .transpose()?;

    let mut out = output_sink(args.out.as_deref())?;
    let line = RecoverOutput { result: &result, certificate, metrics };
    serde_json::to_writer(&mut out, &line).map_err(io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::from_file(&args.config)?;
    if args.paper_scale {
        cfg = cfg.with_paper_scale();
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(o) = args.output {
        cfg.output_path = o;
    }
    let out = run_and_write(args.study, &cfg)?;
    let failed = out.rows.iter().filter(|r| r.error.is_some()).count();
    eprintln!(
        "{} sweep: {} rows written to {} ({} failed trials)",
        args.study.name(),
        out.rows.len(),
        cfg.output_path.display(),
        failed
    );
    Ok(())
}

fn first_index(args: FirstIndexArgs) -> Result<()> {
    let rows = run_first_index_study(args.n, args.s, &args.m_list, args.trials, args.seed)?;
    write_first_index_csv(output_sink(args.output.as_deref())?, &rows)
}

#[derive(Serialize)]
struct ExpectationOutput {
    trials: usize,
    estimate: f64,
    std_error: f64,
    expected: f64,
    deviation: f64,
}

fn expectation_check(args: ExpectationArgs) -> Result<()> {
    let e1 = SparseSignal::from_entries(args.n, &[(0, 1.0)])?;
    let est = monte_carlo_expectation(&e1, 0, args.trials, args.seed)?;
    let expected = 2.0 / (2.0 * std::f64::consts::PI).sqrt();
    let line = ExpectationOutput {
        trials: est.trials,
        estimate: est.mean,
        std_error: est.std_error,
        expected,
        deviation: est.mean - expected,
    };
    println!("{}", serde_json::to_string(&line).map_err(io::Error::from)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Recover(a) => recover_cmd(a),
        Command::Bench(a) => bench(a),
        Command::FirstIndex(a) => first_index(a),
        Command::ExpectationCheck(a) => expectation_check(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
