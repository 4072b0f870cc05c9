//! Compare STrMP with exhaustive support enumeration on tiny instances.

use obcs::model::{derive_seed, Instance};
use obcs::oracle::brute_force_l0;
use obcs::strmp::{run_strmp, StrmpConfig};

fn main() -> obcs::Result<()> {
    let (m, n, s) = (80, 16, 2);
    let (mut agree, mut sparser) = (0, 0);
    for t in 0..20 {
        let inst = Instance::generate(m, n, s, derive_seed(9, t))?;
        let (a, y) = (inst.ensemble.a(), inst.ensemble.y());
        let oracle = brute_force_l0(a, y, 3, 1.0)?;
        let res = run_strmp(a, y, &StrmpConfig::new(s))?;
        let minimal = res.converged && oracle.is_minimal_support(&res.support);
        agree += usize::from(minimal);
        sparser += usize::from(oracle.min_sparsity.is_some_and(|k| k < s));
        println!(
            "trial {t:2}: true {:?} oracle min {:?} ({} minimal supports), STrMP {:?} converged={} minimal={minimal}",
            inst.signal.support(),
            oracle.min_sparsity,
            oracle.minimal_supports.len(),
            res.support,
            res.converged
        );
    }
    println!("STrMP found a minimal support in {agree}/20; a sparser consistent vector existed in {sparser}/20");
    Ok(())
}
