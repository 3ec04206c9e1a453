//! Entropy-monotone paths of equilibrium states: towards a periodic orbit
//! on the golden-mean shift, and between two orbits on the full 2-shift.

use multispec::convex::linspace;
use multispec::paths::{
    log_s_grid, single_sided_path, single_sided_rotation, two_sided_path, two_sided_potential, verify_path_claims,
    ClaimOptions,
};
use multispec::spectra::rotation_set;
use multispec::{PeriodicOrbit, Sft};

fn main() -> multispec::Result<()> {
    let golden = Sft::golden_mean();
    let orbit = PeriodicOrbit::parse("0")?;
    let grid = log_s_grid(1e-3, 1e3, 40);
    let path = single_sided_path(&golden, &orbit, 3, &grid)?;
    println!("{:>12} {:>14} {:>14}", "s", "int phi", "entropy");
    for p in path.iter().step_by(6) {
        println!("{:>12.4e} {:>14.10} {:>14.10}", p.s, p.integral, p.entropy);
    }
    let rot = single_sided_rotation(&golden, &orbit, 3)?;
    let opts = ClaimOptions { rotation: Some(&rot), strict: false };
    print!("{}", verify_path_claims(&path, golden.topological_entropy()?, opts).to_text());

    let full = Sft::full_shift(2);
    let (a, b) = (PeriodicOrbit::parse("0")?, PeriodicOrbit::parse("1")?);
    let path = two_sided_path(&full, &a, &b, 2, &linspace(-1.0, 1.0, 41))?;
    let rot = rotation_set(&full, &two_sided_potential(&full, &a, &b, 2)?)?;
    println!("\ntwo-sided path 0 -> 1");
    for p in path.iter().step_by(5) {
        println!("{:>6.2} {:>14.10} {:>14.10}", p.t, p.integral, p.entropy);
    }
    let opts = ClaimOptions { rotation: Some(&rot), strict: false };
    print!("{}", verify_path_claims(&path, 2f64.ln(), opts).to_text());
    Ok(())
}
