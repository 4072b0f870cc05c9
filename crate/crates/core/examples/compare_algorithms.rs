//! STrMP, STrMP-l1 and BIHT on the same instances, averaged over trials.
//!
//! cargo run --release --example compare_algorithms

use obcs::metrics::MetricsRecord;
use obcs::model::{derive_seed, Instance};
use obcs::{recover, Algorithm, RecoveryOptions};

fn main() -> obcs::Result<()> {
    let (n, s, trials) = (200, 6, 20);
    println!("{:>6} {:>10} {:>9} {:>9} {:>11}", "m", "algorithm", "SNR dB", "Hamming", "consistent");
    for m in [100, 200, 400] {
        for alg in Algorithm::ALL {
            let (mut snr, mut ham, mut consistent) = (0.0, 0.0, 0);
            for t in 0..trials {
                let seed = derive_seed(42, t);
                let inst = Instance::generate(m, n, s, seed)?;
                let (a, y) = (inst.ensemble.a(), inst.ensemble.y());
                let res = recover(alg, a, y, &RecoveryOptions::new(s))?;
                let rec = MetricsRecord::evaluate(
                    alg,
                    res.x_unit.view(),
                    inst.signal.values().view(),
                    a,
                    y.view(),
                    s,
                    seed,
                    0.0,
                )?;
                // Exact recovery gives infinite SNR; cap it for the average.
                snr += rec.snr_db.min(100.0);
                ham += rec.hamming_error;
                consistent += usize::from(rec.hamming_error == 0.0);
            }
            let k = trials as f64;
            println!("{m:>6} {:>10} {:>9.2} {:>9.4} {:>8}/{trials}", alg.name(), snr / k, ham / k, consistent);
        }
    }
    Ok(())
}
