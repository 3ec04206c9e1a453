//! Upper semicontinuity of the spectrum map fails at `-1[11]`: perturbing
//! towards `-1[x0 = 1]` drops the right end of the graph to `(0, 0)`.

use multispec::spectra::usc_failure_demo;
use multispec::Sft;

fn main() -> multispec::Result<()> {
    let report = usc_failure_demo(&Sft::full_shift(2), &[0.2, 0.1, 0.05, 0.01])?;
    println!("delta = dist((0,0), graph of phi) = {:.6}", report.delta);
    println!("{:>6} {:>14} {:>14}", "t", "e(G_t, G)", "e(G, G_t)");
    for r in &report.rows {
        println!("{:>6} {:>14.6} {:>14.6}", r.t, r.excess_upper, r.excess_lower);
    }
    println!("gap persists: {}", report.upper_gap_persists);
    println!("lower excess shrinks with t: {}", report.lower_excess_decreasing);
    Ok(())
}
