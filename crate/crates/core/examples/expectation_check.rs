//! Monte Carlo check of E[a_j sign(a^T x)] = sqrt(2/pi) x_j for unit x.

use obcs::model::SparseSignal;
use obcs::oracle::monte_carlo_expectation;

fn main() -> obcs::Result<()> {
    let x = SparseSignal::from_entries(50, &[(3, 0.6), (17, -0.8)])?;
    let c = (2.0 / std::f64::consts::PI).sqrt();
    for j in [3, 17, 20] {
        for trials in [1_000, 100_000] {
            let est = monte_carlo_expectation(&x, j, trials, 1)?;
            let expected = c * x.values()[j];
            println!(
                "j = {j:2}, {trials:>6} trials: {:+.4} +- {:.4} (expected {expected:+.4})",
                est.mean, est.std_error
            );
        }
    }
    Ok(())
}
