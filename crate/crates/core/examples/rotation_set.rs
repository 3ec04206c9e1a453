//! Rotation sets from maximum mean cycles, checked against every periodic
//! orbit up to period 12, and the entropy of the critical subgraphs.

use multispec::oracle::enumerate_orbits;
use multispec::spectra::{critical_subgraph_entropy, rotation_set, Side};
use multispec::{Potential, Sft};

fn main() -> multispec::Result<()> {
    let golden = Sft::golden_mean();
    let full = Sft::full_shift(2);
    let cases = [
        ("x0, golden mean", golden.clone(), Potential::first_symbol(&golden)),
        ("-1[11], full shift", full.clone(), Potential::negative_indicator(&full, &[1, 1])?),
        (
            "x0 x1 - x0/3, full shift",
            full.clone(),
            Potential::from_fn(&full, 2, |w| (w[0] * w[1]) as f64 - w[0] as f64 / 3.0)?,
        ),
    ];
    for (name, sft, phi) in cases {
        let r = rotation_set(&sft, &phi)?;
        let catalog = enumerate_orbits(&sft, 12)?;
        let ((lo, _), (hi, _)) = catalog.extreme_averages(&phi)?;
        println!("{name}");
        println!("  Karp     [{:.12}, {:.12}] via {} / {}", r.alpha_min, r.alpha_max, r.argmin_cycle, r.argmax_cycle);
        println!("  catalog  [{lo:.12}, {hi:.12}] over {} orbits", catalog.len());
        println!(
            "  endpoint entropies {:.6} / {:.6}",
            critical_subgraph_entropy(&sft, &phi, Side::Min)?,
            critical_subgraph_entropy(&sft, &phi, Side::Max)?
        );
    }
    Ok(())
}
