//! Three potentials with the binary-entropy spectrum, with periodic orbits
//! certifying that no two are cohomologous.

use multispec::convex::{validate_cms, GridFunction};
use multispec::realize::{realize_many, RealizeOptions};
use multispec::Sft;

fn main() -> multispec::Result<()> {
    let full = Sft::full_shift(2);
    let h = |a: f64| {
        let xlogx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
        -xlogx(a) - xlogx(1.0 - a)
    };
    let target = validate_cms(&GridFunction::uniform(0.0, 1.0, 201, h)?, 2f64.ln(), 1e-12)?;
    let many = realize_many(&full, &target, 2, 3, 1e-4, &RealizeOptions::default())?;
    for (i, r) in many.results.iter().enumerate() {
        let v: Vec<String> = r.result.potential.values().iter().map(|x| format!("{x:.4}")).collect();
        println!("phi_{i} = [{}]  d_ms {:.2e}", v.join(", "), r.result.target_error);
    }
    for p in &many.pairs {
        match &p.witness {
            Some(w) => println!(
                "({}, {}): orbit {} avg {:.6}, orbit {} avg {:.6}",
                p.i, p.j, w.orbit1, w.avg1, w.orbit2, w.avg2
            ),
            None => println!("({}, {}): unresolved", p.i, p.j),
        }
    }
    Ok(())
}
