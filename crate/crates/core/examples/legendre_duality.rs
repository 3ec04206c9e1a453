//! Spectrum from a pressure function by convex conjugation, and back.

use multispec::convex::{fenchel_roundtrip_error, spectrum_from_pressure, GridFunction};

fn main() -> multispec::Result<()> {
    let logistic = |t: f64| if t > 0.0 { t + (-t).exp().ln_1p() } else { t.exp().ln_1p() };
    let f = GridFunction::uniform(-30.0, 30.0, 2001, logistic)?;
    let h = spectrum_from_pressure(&f, 1e-6)?;
    println!(
        "h = -F* on [{:.6}, {:.6}], maximum {:.12} at {:.6}",
        h.domain().0,
        h.domain().1,
        h.max_value,
        h.maximizer()
    );
    for a in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let exact = -a * f64::ln(a) - (1.0 - a) * f64::ln(1.0 - a);
        println!("  h({a}) = {:.9}   binary entropy {exact:.9}", h.base.eval_linear(a));
    }
    let f10 = GridFunction::uniform(-10.0, 10.0, 2001, logistic)?;
    println!("F** vs F on the inner 90%: {:.2e}", fenchel_roundtrip_error(&f10)?);
    Ok(())
}
