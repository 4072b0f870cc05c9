//! A small fixed-sparsity sweep, written as CSV plus aggregates and metadata.
//!
//! cargo run --release --example accuracy_sweep -- [output.csv]

use obcs::harness::{run_and_write, ExperimentConfig, Study};

fn main() -> obcs::Result<()> {
    let output = std::env::args().nth(1).unwrap_or_else(|| "accuracy_sweep.csv".into());
    let cfg = ExperimentConfig { trials: 10, output_path: output.into(), ..ExperimentConfig::fixed_sparsity(false) };
    println!("config:\n{}", cfg.to_config_string());

    let out = run_and_write(Study::Accuracy, &cfg)?;
    println!("{:>6} {:>10} {:>9} {:>9} {:>6}", "m/n", "algorithm", "SNR dB", "Hamming", "exact");
    for a in &out.aggregates {
        println!(
            "{:>6} {:>10} {:>9.2} {:>9.4} {:>6}",
            a.sweep_value,
            a.algorithm.name(),
            a.snr_mean,
            a.hamming_mean,
            a.n_exact
        );
    }
    println!("rows in {}, aggregates in {}", cfg.output_path.display(), cfg.companion_path("aggregate.csv").display());
    Ok(())
}
