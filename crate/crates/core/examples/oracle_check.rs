//! Brute-force checks: periodic-point pressure estimates and word-count
//! spectra against the transfer-operator values.

use multispec::oracle::{periodic_pressure_errors, word_count_spectrum};
use multispec::spectra::{entropy_spectrum, DEFAULT_T_MAX};
use multispec::{Potential, Sft};

fn main() -> multispec::Result<()> {
    let golden = Sft::golden_mean();
    let phi = Potential::from_fn(&golden, 2, |w| w[0] as f64 - 0.3 * w[1] as f64)?;
    for t in [-1.0, 0.5, 2.0] {
        let errs = periodic_pressure_errors(&golden, &phi, t, &[4, 8, 12])?;
        println!("t = {t:>4}: |P_n - P| for n = 4, 8, 12: {:.2e} {:.2e} {:.2e}", errs[0], errs[1], errs[2]);
    }
    let full = Sft::full_shift(2);
    let x0 = Potential::first_symbol(&full);
    let words = word_count_spectrum(&full, &x0, 20, 10)?;
    let exact = entropy_spectrum(&full, &x0, 201, DEFAULT_T_MAX)?;
    println!("\nword counts at n = 20 vs the spectrum of x0:");
    for &(a, v) in words.points() {
        println!("  {a:.3} {v:.4} {:.4}", exact.value_at(a).unwrap_or(f64::NAN));
    }
    Ok(())
}
