//! Pressure `t -> P(t phi)` and equilibrium states for `phi = x0` on the
//! full 2-shift and on the golden-mean shift.

use multispec::convex::linspace;
use multispec::thermo::{equilibrium, measure_entropy, measure_integral, pressure_curve};
use multispec::{Potential, Sft};

fn main() -> multispec::Result<()> {
    for (name, sft) in [("full 2-shift", Sft::full_shift(2)), ("golden mean", Sft::golden_mean())] {
        let phi = Potential::first_symbol(&sft);
        let curve = pressure_curve(&sft, &phi, &linspace(-4.0, 4.0, 9))?;
        println!("{name}: h_top = {:.12}", sft.topological_entropy()?);
        println!("{:>6} {:>16} {:>12} {:>12}", "t", "P(t phi)", "int phi", "entropy");
        for (&t, &p) in curve.t_grid.iter().zip(&curve.values) {
            let (_, mu) = equilibrium(&sft, &phi, t)?;
            println!(
                "{t:>6.1} {p:>16.12} {:>12.8} {:>12.8}",
                measure_integral(&mu, &phi)?,
                measure_entropy(&mu)
            );
        }
        println!("convexity defect {:.1e}\n", curve.convexity_defect());
    }
    Ok(())
}
