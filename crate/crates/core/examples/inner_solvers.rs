//! The two inner solvers on one reduced subproblem restricted to the true
//! support, with and without the pivot column's margin.

use obcs::model::Instance;
use obcs::reduction::{build_reduced_problem, select_first_index};
use obcs::solvers::{bb_minimize, default_l1_tol, default_l2_tol, l1_minimize, ObjectiveKind, SubproblemSpec};

fn main() -> obcs::Result<()> {
    let inst = Instance::generate(300, 100, 5, 3)?;
    let (a, y) = (inst.ensemble.a(), inst.ensemble.y());
    let j0 = select_first_index(a, y)?;
    let rp = build_reduced_problem(a, y, j0, 1.0)?;
    let active: Vec<usize> = (0..rp.dim()).filter(|&k| inst.signal.support().contains(&rp.original_index(k))).collect();
    println!("pivot {j0}, active reduced columns {active:?}");

    let z0 = ndarray::Array1::zeros(active.len());
    let l2 = SubproblemSpec::new(&rp.c, &rp.d, active.clone(), ObjectiveKind::L2)?;
    let r = bb_minimize(&l2, z0.view(), default_l2_tol(&rp.d), 2000)?;
    println!(
        "BB l2:  f = {:.3e} after {} iterations (converged {}, |grad| {:.2e})",
        r.objective_value, r.iterations, r.converged, r.grad_norm_final
    );

    let l1 = SubproblemSpec::new(&rp.c, &rp.d, active, ObjectiveKind::L1)?;
    let r = l1_minimize(&l1, z0.view(), default_l1_tol(&rp.d), 2000)?;
    println!("l1:     f = {:.3e} after {} iterations (converged {})", r.objective_value, r.iterations, r.converged);
    Ok(())
}
