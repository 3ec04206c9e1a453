//! Birkhoff entropy spectrum of `x0` on the full 2-shift against the
//! binary entropy, and of a depth-2 potential on the golden-mean shift.

use multispec::spectra::{entropy_spectrum, SpectrumEngine, DEFAULT_T_MAX};
use multispec::{Potential, Sft};

fn main() -> multispec::Result<()> {
    let full = Sft::full_shift(2);
    let phi = Potential::first_symbol(&full);
    let engine = SpectrumEngine::new(&full, &phi, DEFAULT_T_MAX)?;
    let h = |a: f64| -a * a.ln() - (1.0 - a) * (1.0 - a).ln();
    let mut worst: f64 = 0.0;
    for i in 1..20 {
        let a = i as f64 / 20.0;
        worst = worst.max((engine.value_at(a)?.value - h(a)).abs());
    }
    println!("x0 on the full 2-shift: max |E(a) - H(a)| on 19 points = {worst:.2e}");
    println!("endpoint entropies {:?}", engine.endpoint_values());

    let golden = Sft::golden_mean();
    let psi = Potential::from_fn(&golden, 2, |w| if w == [0, 0] { 1.0 } else { -0.5 })?;
    let graph = entropy_spectrum(&golden, &psi, 11, DEFAULT_T_MAX)?;
    let (lo, hi) = graph.domain();
    println!("\ngolden mean, depth-2 potential: rotation set [{lo:.6}, {hi:.6}]");
    for &(a, e) in graph.points().iter().step_by((graph.len() / 12).max(1)) {
        println!("  {a:>10.6} {e:>10.6}");
    }
    let (a, m) = graph.max_point();
    println!("peak ({a:.6}, {m:.6}), h_top = {:.6}", golden.topological_entropy()?);
    Ok(())
}
