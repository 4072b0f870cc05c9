//! Draw a Gaussian instance, recover it with STrMP and report the metrics.
//!
//! cargo run --release --example recover_signal -- [m n s seed]

use obcs::metrics::MetricsRecord;
use obcs::model::Instance;
use obcs::reduction::certify_solution;
use obcs::{recover, Algorithm, RecoveryOptions};

fn main() -> obcs::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let (m, n, s, seed) = match args[..] {
        [m, n, s, seed] => (m, n, s, seed as u64),
        _ => (400, 200, 8, 1),
    };

    let inst = Instance::generate(m, n, s, seed)?;
    let (a, y) = (inst.ensemble.a(), inst.ensemble.y());
    let res = recover(Algorithm::Strmp, a, y, &RecoveryOptions::new(s))?;

    println!("m={m} n={n} s={s} seed={seed}");
    println!("true support      {:?}", inst.signal.support());
    println!("recovered support {:?}", res.support);
    println!("stop: {:?} after {} iterations, residual {:.3e}", res.stop_reason, res.iterations, res.final_residual);
    for (k, t) in res.per_iteration_trace.iter().enumerate() {
        println!("  iter {k:2}: added {:?}, residual {:.3e}", t.indices, t.residual);
    }

    let cert = certify_solution(res.x_raw.view(), a, y, s, 1.0)?;
    let met = MetricsRecord::evaluate(
        Algorithm::Strmp,
        res.x_unit.view(),
        inst.signal.values().view(),
        a,
        y.view(),
        s,
        seed,
        res.wall_time,
    )?;
    println!("consistent={} ||Ax||_1={:.6}", cert.consistent, cert.l1_of_ax);
    println!(
        "SNR {:.2} dB, missed {}, misidentified {}, Hamming {:.4}, ||x - x*|| {:.4}",
        met.snr_db, met.missed, met.misidentified, met.hamming_error, met.l2_error_unit
    );
    Ok(())
}
