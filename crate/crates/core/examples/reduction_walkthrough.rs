//! The normalization-free reduction on a small instance: pick the pivot,
//! build `C z + d >= 0`, lift the true signal and check it is feasible.

use obcs::model::{l2_norm, Instance};
use obcs::reduction::{build_reduced_problem, certify_solution, lift_solution, select_first_index};

fn main() -> obcs::Result<()> {
    let inst = Instance::generate(60, 10, 3, 11)?;
    let (a, y) = (inst.ensemble.a(), inst.ensemble.y());
    let x = inst.signal.values();

    let j0 = select_first_index(a, y)?;
    println!(
        "support {:?}, pivot j0 = {j0} (in support: {})",
        inst.signal.support(),
        inst.signal.support().contains(&j0)
    );

    let rp = build_reduced_problem(a, y, j0, 1.0)?;
    println!("reduced problem: C is {}x{}, y^T A_j0 = {:.4}", rp.m(), rp.dim(), rp.pivot);

    // Scale x so y^T A x = c0, then drop the pivot coordinate.
    let scale = 1.0 / y.dot(&a.dot(x));
    let z: ndarray::Array1<f64> = rp.col_map.iter().map(|&j| x[j] * scale).collect();
    let r = rp.residual(z.view());
    let worst = r.iter().copied().fold(f64::INFINITY, f64::min);
    println!("min_i (C z + d)_i = {worst:.3e} (feasible: {})", worst >= -1e-12);

    let lifted = lift_solution(z.view(), &rp, a, y)?;
    println!("lift error vs scaled truth: {:.3e}", l2_norm((&lifted - &(x * scale)).view()));
    let cert = certify_solution(lifted.view(), a, y, 3, 1.0)?;
    println!("certificate: consistent {}, ||Ax||_1 = {:.12}", cert.consistent, cert.l1_of_ax);
    Ok(())
}
