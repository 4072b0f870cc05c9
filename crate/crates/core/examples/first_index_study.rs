//! How often the first greedy pick lands in the true support as m grows.

use obcs::harness::run_first_index_study;

fn main() -> obcs::Result<()> {
    let m_values = [10, 30, 60, 100, 150, 200, 300];
    for row in run_first_index_study(1000, 15, &m_values, 100, 0)? {
        let bar = "#".repeat((row.rate * 40.0).round() as usize);
        println!("m = {:4}  {:.2}  {bar}", row.m, row.rate);
    }
    Ok(())
}
