//! Approximate an asymmetric concave spectrum by potentials of depth
//! 1, 2 and 3, each fit warm-starting the next.

use multispec::convex::{validate_cms, GridFunction};
use multispec::realize::{realize_spectrum_depths, RealizeOptions};
use multispec::Sft;

fn main() -> multispec::Result<()> {
    let full = Sft::full_shift(2);
    let l2 = 2f64.ln();
    // parabola with maximum log 2 at 0.3, vanishing at 0 and 1
    let target = |a: f64| {
        let w = if a < 0.3 { 0.3 } else { 0.7 };
        l2 * (1.0 - ((a - 0.3) / w).powi(2))
    };
    let h = validate_cms(&GridFunction::uniform(0.0, 1.0, 401, target)?, l2, 1e-12)?;
    let fits = realize_spectrum_depths(&full, &h, &[1, 2, 3], 1e-4, &RealizeOptions::default())?;
    println!("{:>5} {:>12} {:>12} {:>24}", "depth", "d_ms", "pressure", "rotation set");
    for (k, r) in fits.iter().enumerate() {
        println!(
            "{:>5} {:>12.4e} {:>12.4e}   [{:.6}, {:.6}]",
            k + 1,
            r.result.target_error,
            r.pressure_error,
            r.rotation.alpha_min,
            r.rotation.alpha_max
        );
    }
    Ok(())
}
