//! Recover a potential from its pressure function, and reject a target
//! whose value at 0 is not the topological entropy.

use multispec::convex::GridFunction;
use multispec::realize::{realize_pressure, RealizeOptions};
use multispec::Sft;

fn main() -> multispec::Result<()> {
    let full = Sft::full_shift(2);
    let logistic = |t: f64| if t > 0.0 { t + (-t).exp().ln_1p() } else { t.exp().ln_1p() };
    let f = GridFunction::uniform(-20.0, 20.0, 4001, logistic)?;
    let r = realize_pressure(&full, &f, 1, &RealizeOptions::default())?;
    println!(
        "table {:?}\nsup error {:.2e} after {} iterations (converged: {})",
        r.potential.values(),
        r.target_error,
        r.iterations,
        r.converged
    );

    let shifted = f.map_values(|_, v| v + 0.5);
    match realize_pressure(&full, &shifted, 1, &RealizeOptions::default()) {
        Err(e) => println!("shifted target: {e}"),
        Ok(_) => println!("shifted target unexpectedly accepted"),
    }
    Ok(())
}
