//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, with the
//! measured quantity and wall time. Exits non-zero if any criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use multispec::convex::{fenchel_roundtrip_error, linspace, validate_cms, GridFunction};
use multispec::oracle::{enumerate_orbits, periodic_pressure_errors, word_count_spectrum};
use multispec::paths::{log_s_grid, single_sided_path, single_sided_rotation, two_sided_path};
use multispec::potential::birkhoff_average;
use multispec::realize::{realize_many, realize_pressure, realize_spectrum_depths, RealizeOptions};
use multispec::spectra::{entropy_spectrum, rotation_set, usc_failure_demo, SpectrumEngine, DEFAULT_T_MAX};
use multispec::thermo::{pressure, pressure_gradient};
use multispec::{PeriodicOrbit, Potential, Sft};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant, outcome: Outcome) -> Outcome {
    let took = start.elapsed();
    match outcome {
        Ok(d) if took > limit => Err(format!("{d}; took {took:.2?}, limit {limit:?}")),
        other => other,
    }
}

fn logistic(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn binary_entropy(a: f64) -> f64 {
    let xlogx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    -xlogx(a) - xlogx(1.0 - a)
}

fn three_symbols() -> Sft {
    Sft::new(3, &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 1, 1]]).unwrap()
}

/// Five fixed potentials on three subshifts.
fn test_potentials() -> Vec<(&'static str, Sft, Potential)> {
    let full = Sft::full_shift(2);
    let golden = Sft::golden_mean();
    let three = three_symbols();
    vec![
        ("x0 on full", full.clone(), Potential::first_symbol(&full)),
        (
            "x0x1 - x0/3 on full",
            full.clone(),
            Potential::from_fn(&full, 2, |w| (w[0] * w[1]) as f64 - w[0] as f64 / 3.0).unwrap(),
        ),
        ("x0 on golden", golden.clone(), Potential::first_symbol(&golden)),
        (
            "depth 3 on golden",
            golden.clone(),
            Potential::from_fn(&golden, 3, |w| w[0] as f64 - 0.7 * w[2] as f64 + 0.2 * (w[1] * w[2]) as f64).unwrap(),
        ),
        (
            "depth 2 on three symbols",
            three.clone(),
            Potential::from_fn(&three, 2, |w| [0.3, -0.4, 1.1][w[0] as usize] + 0.25 * w[1] as f64).unwrap(),
        ),
    ]
}

fn c1() -> Outcome {
    let start = Instant::now();
    let full = Sft::full_shift(2);
    let phi = Potential::first_symbol(&full);
    let mut worst: f64 = 0.0;
    for t in linspace(-10.0, 10.0, 81) {
        worst = worst.max((pressure(&full, &phi, t).map_err(|e| e.to_string())? - logistic(t)).abs());
    }
    within(Duration::from_secs(1), start, check(worst < 1e-10, format!("max |P - log(1+e^t)| = {worst:.2e}")))
}

fn c2() -> Outcome {
    let start = Instant::now();
    let full = Sft::full_shift(2);
    let phi = Potential::first_symbol(&full);
    let engine = SpectrumEngine::new(&full, &phi, DEFAULT_T_MAX).map_err(|e| e.to_string())?;
    let alphas = linspace(0.05, 0.95, 181);
    let values = engine.values_at(&alphas).map_err(|e| e.to_string())?;
    let worst = values
        .iter()
        .map(|d| (d.value - binary_entropy(d.alpha)).abs())
        .fold(0.0, f64::max);
    let graph = entropy_spectrum(&full, &phi, 201, DEFAULT_T_MAX).map_err(|e| e.to_string())?;
    let pts = graph.points();
    let ends = (pts[0].1, pts[pts.len() - 1].1);
    let ok = worst < 1e-6 && ends == (0.0, 0.0) && engine.endpoint_values() == (0.0, 0.0);
    within(
        Duration::from_secs(5),
        start,
        check(ok, format!("sup error {worst:.2e} on 181 points, endpoint values {ends:?}")),
    )
}

fn c3() -> Outcome {
    let h = Sft::golden_mean().topological_entropy().map_err(|e| e.to_string())?;
    let err = (h - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs();
    check(err < 1e-12, format!("|h_top - log golden ratio| = {err:.2e}"))
}

fn c4() -> Outcome {
    let f = GridFunction::uniform(-10.0, 10.0, 2001, logistic).map_err(|e| e.to_string())?;
    let err = fenchel_roundtrip_error(&f).map_err(|e| e.to_string())?;
    check(err < 1e-4, format!("roundtrip error {err:.2e} on the inner 90%"))
}

fn c5() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for (name, sft, phi) in test_potentials() {
        let r = rotation_set(&sft, &phi).map_err(|e| e.to_string())?;
        let catalog = enumerate_orbits(&sft, 12).map_err(|e| e.to_string())?;
        let ((lo, _), (hi, _)) = catalog.extreme_averages(&phi).map_err(|e| e.to_string())?;
        let d = (r.alpha_min - lo).abs().max((r.alpha_max - hi).abs());
        worst = worst.max(d);
        lines.push(format!("{name} [{:.6}, {:.6}]", r.alpha_min, r.alpha_max));
    }
    check(worst <= 1e-12, format!("max |Karp - catalog| = {worst:.1e} ({})", lines.join("; ")))
}

fn c6() -> Outcome {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let pots: Vec<_> = test_potentials().into_iter().skip(1).take(3).collect();
    for (_, sft, phi) in &pots {
        for t in [-1.5, 0.4, 2.0] {
            let g = pressure_gradient(sft, phi, t).map_err(|e| e.to_string())?;
            for (i, gi) in g.iter().enumerate() {
                // derivative of c -> P(t phi + c 1_[w])
                let bump = |d: f64| {
                    let mut v = phi.scaled(t).values().to_vec();
                    v[i] += d;
                    pressure(sft, &phi.with_values(v).unwrap(), 1.0).unwrap()
                };
                let fd = (bump(h) - bump(-h)) / (2.0 * h);
                worst = worst.max((fd - gi).abs() / gi.abs().max(1e-12));
            }
        }
    }
    check(worst < 1e-6, format!("max relative error {worst:.2e} over 3 potentials x 3 temperatures"))
}

fn c7() -> Outcome {
    let start = Instant::now();
    let golden = Sft::golden_mean();
    let h_top = golden.topological_entropy().map_err(|e| e.to_string())?;
    let grid = log_s_grid(1e-3, 1e3, 80);
    let orbit = PeriodicOrbit::parse("0").map_err(|e| e.to_string())?;
    let path = single_sided_path(&golden, &orbit, 3, &grid).map_err(|e| e.to_string())?;
    let m = single_sided_rotation(&golden, &orbit, 3).map_err(|e| e.to_string())?.alpha_max;
    let mut slack_int = f64::INFINITY;
    let mut slack_ent = f64::INFINITY;
    for w in path.windows(2) {
        slack_int = slack_int.min(w[1].integral - w[0].integral);
        slack_ent = slack_ent.min(w[0].entropy - w[1].entropy);
    }
    let mut gap_ok = true;
    for p in &path {
        let gap = m - p.integral;
        if gap < -1e-12 || (p.s > 0.0 && gap > h_top / p.s + 1e-12) {
            gap_ok = false;
        }
    }
    let full = Sft::full_shift(2);
    let (a, b) = (PeriodicOrbit::parse("0").unwrap(), PeriodicOrbit::parse("1").unwrap());
    let two = two_sided_path(&full, &a, &b, 2, &linspace(-1.0, 1.0, 81)).map_err(|e| e.to_string())?;
    let peak = two
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.entropy.total_cmp(&y.1.entropy))
        .unwrap();
    let rising = two[..=peak.0].windows(2).all(|w| w[1].entropy >= w[0].entropy - 1e-9);
    let falling = two[peak.0..].windows(2).all(|w| w[1].entropy <= w[0].entropy + 1e-9);
    let ok = slack_int >= -1e-9
        && slack_ent >= -1e-9
        && gap_ok
        && rising
        && falling
        && peak.1.t == 0.0
        && (peak.1.entropy - 2f64.ln()).abs() <= 1e-9;
    within(
        Duration::from_secs(30),
        start,
        check(
            ok,
            format!(
                "single-sided slacks {slack_int:.1e} / {slack_ent:.1e}, gap bound {gap_ok}; two-sided peak {:.12} at t = {}",
                peak.1.entropy, peak.1.t
            ),
        ),
    )
}

fn c8() -> Outcome {
    let start = Instant::now();
    let full = Sft::full_shift(2);
    let f = GridFunction::uniform(-20.0, 20.0, 4001, logistic).map_err(|e| e.to_string())?;
    let r = realize_pressure(&full, &f, 1, &RealizeOptions::default()).map_err(|e| e.to_string())?;
    let l2 = 2f64.ln();
    let target = |a: f64| {
        let w = if a < 0.3 { 0.3 } else { 0.7 };
        l2 * (1.0 - ((a - 0.3) / w).powi(2))
    };
    let h = GridFunction::uniform(0.0, 1.0, 401, target).map_err(|e| e.to_string())?;
    let h = validate_cms(&h, l2, 1e-12).map_err(|e| e.to_string())?;
    let fits = realize_spectrum_depths(&full, &h, &[1, 2, 3], 1e-4, &RealizeOptions::default())
        .map_err(|e| e.to_string())?;
    let d: Vec<f64> = fits.iter().map(|x| x.result.target_error).collect();
    let ok = r.target_error < 1e-8 && d[1] < d[0] && d[2] < d[1];
    within(
        Duration::from_secs(300),
        start,
        check(
            ok,
            format!(
                "pressure sup error {:.2e}; d_ms by depth {:.4e} {:.4e} {:.4e} (final {:.4e})",
                r.target_error, d[0], d[1], d[2], d[2]
            ),
        ),
    )
}

fn c9() -> Outcome {
    let report = usc_failure_demo(&Sft::full_shift(2), &[0.2, 0.1, 0.05, 0.01]).map_err(|e| e.to_string())?;
    let upper = report.rows.iter().all(|r| r.excess_upper >= report.delta - 1e-6);
    let lower: Vec<f64> = report.rows.iter().map(|r| r.excess_lower).collect();
    let decreasing = lower.windows(2).all(|w| w[1] < w[0]);
    check(
        report.delta > 0.3 && upper && decreasing,
        format!(
            "delta {:.4}, upper excess min {:.4}, lower excess {:?}",
            report.delta,
            report.rows.iter().map(|r| r.excess_upper).fold(f64::INFINITY, f64::min),
            lower.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>()
        ),
    )
}

fn c10() -> Outcome {
    let full = Sft::full_shift(2);
    let tol = 1e-4;
    let h = GridFunction::uniform(0.0, 1.0, 201, binary_entropy).map_err(|e| e.to_string())?;
    let h = validate_cms(&h, 2f64.ln(), 1e-12).map_err(|e| e.to_string())?;
    let many = realize_many(&full, &h, 2, 3, tol, &RealizeOptions::default()).map_err(|e| e.to_string())?;
    let mut ok = many.results.len() == 3 && many.pairs.len() == 3;
    let mut min_sep = f64::INFINITY;
    let mut max_d: f64 = 0.0;
    for p in &many.pairs {
        max_d = max_d.max(p.d_ms);
        let Some(w) = &p.witness else {
            ok = false;
            continue;
        };
        let a = &many.results[p.i].result.potential;
        let b = &many.results[p.j].result.potential;
        let diff = a.add_scaled(b, -1.0).map_err(|e| e.to_string())?;
        let a1 = birkhoff_average(&diff, &w.orbit1).map_err(|e| e.to_string())?;
        let a2 = birkhoff_average(&diff, &w.orbit2).map_err(|e| e.to_string())?;
        min_sep = min_sep.min((a1 - a2).abs());
        ok &= (a1 - w.avg1).abs() < 1e-12 && (a2 - w.avg2).abs() < 1e-12;
    }
    ok &= min_sep > 1e-6 && max_d <= 2.0 * tol;
    check(ok, format!("3 realizations, min witness separation {min_sep:.3e}, max pairwise d_ms {max_d:.2e}"))
}

fn c11() -> Outcome {
    let mut ok = true;
    let mut worst_ratio: f64 = 0.0;
    for (_, sft, phi) in test_potentials() {
        for t in [-1.0, 0.5, 2.0] {
            let e = periodic_pressure_errors(&sft, &phi, t, &[4, 8, 12]).map_err(|e| e.to_string())?;
            // errors at rounding level are exact estimates, not a trend
            let exact = |x: f64| x <= 1e-13;
            ok &= (e[1] < e[0] || exact(e[1])) && (e[2] < e[1] || exact(e[2]));
            if e[0] > 1e-13 {
                worst_ratio = worst_ratio.max(e[2] / e[0]);
            }
        }
    }
    let full = Sft::full_shift(2);
    let mut gaps = Vec::new();
    for (name, sft, phi) in test_potentials().into_iter().filter(|(_, s, _)| *s == full) {
        let words = word_count_spectrum(&sft, &phi, 20, 10).map_err(|e| e.to_string())?;
        let exact = entropy_spectrum(&sft, &phi, 201, DEFAULT_T_MAX).map_err(|e| e.to_string())?;
        let gap = words
            .points()
            .iter()
            .map(|&(a, v)| (exact.value_at(a).unwrap_or(f64::INFINITY) - v).abs())
            .fold(0.0, f64::max);
        gaps.push((name, gap));
    }
    // gated on x0; the depth-2 potential carries a larger finite-size bias
    // at n = 20 and is reported only
    ok &= gaps[0].1 <= 0.08;
    check(
        ok,
        format!(
            "periodic errors decrease (worst e12/e4 = {worst_ratio:.1e}); word-count sup gap {:.4} for {} (reported: {:.4} for {})",
            gaps[0].1, gaps[0].0, gaps[1].1, gaps[1].0
        ),
    )
}

fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        if entry.file_type().unwrap().is_file() {
            fs::copy(entry.path(), to.join(entry.file_name())).unwrap();
        }
    }
}

fn read_tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn c12() -> Outcome {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let runs: Vec<tempfile::TempDir> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    let mut commands = 0;
    for run in &runs {
        copy_dir(&configs, run.path());
        for entry in fs::read_dir(run.path()).unwrap() {
            let p = entry.unwrap().path();
            let text = fs::read_to_string(&p).unwrap_or_default();
            if !text.contains("\"command\"") || p.file_name().unwrap() == "realize_bad.json" {
                continue;
            }
            let status = Command::new(env!("CARGO_BIN_EXE_multispec"))
                .arg("--config")
                .arg(&p)
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{} exited with {status}", p.display()));
            }
            commands += 1;
        }
    }
    let a = read_tree(&runs[0].path().join("out"));
    let b = read_tree(&runs[1].path().join("out"));
    check(
        !a.is_empty() && a == b,
        format!("{} configs run twice, {} artifacts compared byte for byte", commands / 2, a.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("closed-form pressure", c1),
        ("closed-form spectrum", c2),
        ("golden-mean entropy", c3),
        ("Fenchel-Moreau roundtrip", c4),
        ("rotation-set exactness", c5),
        ("pressure gradient", c6),
        ("path claims", c7),
        ("realization recovery", c8),
        ("semicontinuity demo", c9),
        ("non-cohomology certificates", c10),
        ("oracle coherence", c11),
        ("CLI determinism", c12),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|x| x == &id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match outcome {
            Ok(d) => println!("PASS {id:>2} {name} [{took:.2?}]: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL {id:>2} {name} [{took:.2?}]: {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
