//! Paths of equilibrium states along which entropy is monotone.
//!
//! The single-sided path follows `mu_s`, the equilibrium state of `s phi`
//! for the (truncated) distance to a periodic orbit, from the measure of
//! maximal entropy at `s = 0` towards the orbit measure as `s -> inf`. The
//! two-sided path joins two disjoint periodic orbits through the measure of
//! maximal entropy using `phi = g - int g dm_max`, `g` the normalized
//! separation of the orbits, at `s = -tan(pi t / 2)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::{normalized_separation_potential, orbit_distance_potential, PeriodicOrbit, Potential};
use crate::sft::Sft;
use crate::spectra::{rotation_set, RotationInterval};
use crate::thermo::{measure_entropy, Transfer};

/// Largest `|s|` sampled; rows beyond it are the orbit measures themselves.
pub const S_CAP: f64 = 1e6;

const SLACK: f64 = 1e-9;
const STRICT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathSample {
    /// Path parameter: `s` itself on the single-sided path, `t` in `[-1, 1]`
    /// on the two-sided one.
    pub t: f64,
    pub s: f64,
    pub integral: f64,
    pub entropy: f64,
    pub pressure: f64,
}

fn sample(tr: &Transfer, phi: &Potential, t: f64, s: f64) -> Result<PathSample> {
    let (pressure, m) = tr.equilibrium_of(phi.values(), s)?;
    let integral = tr
        .cylinder_masses(&m)
        .iter()
        .zip(phi.values())
        .map(|(a, b)| a * b)
        .sum();
    Ok(PathSample {
        t,
        s,
        integral,
        entropy: measure_entropy(&m),
        pressure,
    })
}

/// Equilibrium states of `s phi` for `phi` the depth-`k` distance potential
/// of `orbit`.
pub fn single_sided_path(sft: &Sft, orbit: &PeriodicOrbit, depth: usize, s_grid: &[f64]) -> Result<Vec<PathSample>> {
    if s_grid.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
        return Err(Error::InvalidGrid("s grid must be finite and nonnegative".into()));
    }
    if s_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidGrid("s grid must be sorted".into()));
    }
    let phi = orbit_distance_potential(sft, orbit, depth)?;
    let tr = Transfer::new(&phi)?;
    s_grid
        .par_iter()
        .map(|&s| sample(&tr, &phi, s, s))
        .collect()
}

/// `g - int g dm_max` for the separation potential of `a` and `b`.
pub fn two_sided_potential(sft: &Sft, a: &PeriodicOrbit, b: &PeriodicOrbit, depth: usize) -> Result<Potential> {
    let g = normalized_separation_potential(sft, a, b, depth)?;
    let tr = Transfer::new(&g)?;
    let (_, m) = tr.equilibrium_of(g.values(), 0.0)?;
    let mean: f64 = tr
        .cylinder_masses(&m)
        .iter()
        .zip(g.values())
        .map(|(x, y)| x * y)
        .sum();
    Ok(g.plus_constant(-mean))
}

/// `s = -tan(pi t / 2)`, capped at `S_CAP` in absolute value.
pub fn s_of_t(t: f64) -> f64 {
    (-(std::f64::consts::FRAC_PI_2 * t).tan()).clamp(-S_CAP, S_CAP)
}

/// Path from the measure on `a` (`t = -1`) through the measure of maximal
/// entropy (`t = 0`) to the measure on `b` (`t = 1`).
pub fn two_sided_path(
    sft: &Sft,
    a: &PeriodicOrbit,
    b: &PeriodicOrbit,
    depth: usize,
    t_grid: &[f64],
) -> Result<Vec<PathSample>> {
    if t_grid.iter().any(|t| !(-1.0..=1.0).contains(t)) {
        return Err(Error::InvalidGrid("t grid must lie in [-1, 1]".into()));
    }
    let phi = two_sided_potential(sft, a, b, depth)?;
    let tr = Transfer::new(&phi)?;
    let end_a = phi.birkhoff_average(a)?;
    let end_b = phi.birkhoff_average(b)?;
    t_grid
        .par_iter()
        .map(|&t| {
            if t == -1.0 || t == 1.0 {
                let (s, integral) = if t < 0.0 { (S_CAP, end_a) } else { (-S_CAP, end_b) };
                Ok(PathSample {
                    t,
                    s,
                    integral,
                    entropy: 0.0,
                    pressure: s * integral,
                })
            } else {
                sample(&tr, &phi, t, s_of_t(t))
            }
        })
        .collect()
}

/// One row of a claim report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimResult {
    pub claim: String,
    pub passed: bool,
    /// Smallest margin by which the claim held (negative when violated).
    pub worst_slack: f64,
    /// Index (into the input samples) where the worst slack occurs.
    pub witness_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimReport {
    pub claims: Vec<ClaimResult>,
}

impl ClaimReport {
    pub fn all_passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn get(&self, claim: &str) -> Option<&ClaimResult> {
        self.claims.iter().find(|c| c.claim == claim)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("claim,passed,worst_slack,witness_index\n");
        for c in &self.claims {
            out.push_str(&format!(
                "{},{},{},{}\n",
                c.claim,
                c.passed,
                crate::io::fmt_f64(c.worst_slack),
                c.witness_index.map_or("-".to_string(), |i| i.to_string())
            ));
        }
        out
    }
}

struct Tracker {
    worst: f64,
    at: Option<usize>,
}

impl Tracker {
    fn new() -> Self {
        Tracker {
            worst: f64::INFINITY,
            at: None,
        }
    }

    fn see(&mut self, slack: f64, index: usize) {
        if slack < self.worst {
            self.worst = slack;
            self.at = Some(index);
        }
    }

    fn finish(self, claim: &str) -> ClaimResult {
        let worst = if self.at.is_none() { 0.0 } else { self.worst };
        ClaimResult {
            claim: claim.to_string(),
            passed: worst >= -SLACK,
            worst_slack: worst,
            witness_index: self.at,
        }
    }
}

/// Options for [`verify_path_claims`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ClaimOptions<'a> {
    /// Rotation interval of the path potential; enables the quantitative
    /// bound and the entropy-tail check.
    pub rotation: Option<&'a RotationInterval>,
    /// Require entropy to strictly decrease in `s` on `s >= 0`.
    pub strict: bool,
}

/// Checks the monotonicity and limit claims on a sampled path.
///
/// Samples are examined in order of increasing `s`. Strict decrease is
/// required between adjacent samples unless both entropies are below
/// `1e-12`, where they can no longer be told apart. The tail check asks
/// the entropy at the largest `|s|` on each side (when `|s| >= 10`) to be
/// at most 5% of `h_top`.
pub fn verify_path_claims(samples: &[PathSample], h_top: f64, opts: ClaimOptions<'_>) -> ClaimReport {
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&i, &j| samples[i].s.total_cmp(&samples[j].s));

    let mut integral = Tracker::new();
    let mut entropy = Tracker::new();
    let mut strict = Tracker::new();
    for w in order.windows(2) {
        let (p, q) = (&samples[w[0]], &samples[w[1]]);
        integral.see(q.integral - p.integral, w[1]);
        if p.s >= 0.0 {
            entropy.see(p.entropy - q.entropy, w[1]);
            if opts.strict && !(p.entropy <= STRICT_TOL && q.entropy <= STRICT_TOL) {
                // a strictly positive gap is required; report it shifted so
                // that passing means slack >= -SLACK
                let gap = p.entropy - q.entropy;
                strict.see(if gap > 0.0 { gap } else { gap - 2.0 * SLACK }, w[1]);
            }
        } else if q.s <= 0.0 {
            entropy.see(q.entropy - p.entropy, w[1]);
        }
    }

    let mut consistency = Tracker::new();
    let mut range = Tracker::new();
    for (i, p) in samples.iter().enumerate() {
        if p.s.abs() < S_CAP {
            consistency.see(-(p.pressure - p.entropy - p.s * p.integral).abs(), i);
        }
        range.see(p.entropy.min(h_top - p.entropy), i);
    }

    let mut bound = Tracker::new();
    let mut tail = Tracker::new();
    if let Some(r) = opts.rotation {
        for (i, p) in samples.iter().enumerate() {
            if p.s > 0.0 {
                let gap = r.alpha_max - p.integral;
                bound.see(gap.min(h_top / p.s - gap), i);
            } else if p.s < 0.0 {
                let gap = p.integral - r.alpha_min;
                bound.see(gap.min(h_top / -p.s - gap), i);
            }
        }
        if !r.is_degenerate() {
            let last = order.last().copied().filter(|&i| samples[i].s >= 10.0);
            let first = order.first().copied().filter(|&i| samples[i].s <= -10.0);
            for i in [first, last].into_iter().flatten() {
                tail.see(0.05 * h_top - samples[i].entropy, i);
            }
        }
    }

    let mut claims = vec![
        integral.finish("integral_nondecreasing"),
        entropy.finish("entropy_unimodal"),
        bound.finish("integral_gap_bound"),
        tail.finish("entropy_tail"),
        consistency.finish("pressure_consistency"),
        range.finish("entropy_range"),
    ];
    if opts.strict {
        claims.push(strict.finish("entropy_strictly_decreasing"));
    }
    ClaimReport { claims }
}

/// Largest `max_w |mu_{s'}[w] - mu_s[w]| / |s' - s|` over adjacent grid
/// points, taken over the cylinders of `phi`'s table.
pub fn continuity_modulus(phi: &Potential, s_grid: &[f64]) -> Result<f64> {
    let tr = Transfer::new(phi)?;
    let masses = s_grid
        .par_iter()
        .map(|&s| {
            let (_, m) = tr.equilibrium_of(phi.values(), s)?;
            Ok(tr.cylinder_masses(&m))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for i in 1..s_grid.len() {
        let ds = (s_grid[i] - s_grid[i - 1]).abs();
        if ds == 0.0 {
            continue;
        }
        let dm = masses[i]
            .iter()
            .zip(&masses[i - 1])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(dm / ds);
    }
    Ok(worst)
}

/// Zero followed by `n - 1` geometrically spaced points from `s_min` to
/// `s_max`.
pub fn log_s_grid(s_min: f64, s_max: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0];
    if n < 2 {
        return out;
    }
    let (a, b) = (s_min.ln(), s_max.ln());
    for i in 0..n - 1 {
        let u = if n == 2 { 1.0 } else { i as f64 / (n - 2) as f64 };
        out.push((a + (b - a) * u).exp());
    }
    out
}

pub fn path_csv(samples: &[PathSample]) -> String {
    crate::io::csv_table(
        &["t", "s", "integral", "entropy", "pressure"],
        samples
            .iter()
            .map(|p| vec![p.t, p.s, p.integral, p.entropy, p.pressure]),
    )
}

/// Rotation interval of the single-sided path potential.
pub fn single_sided_rotation(sft: &Sft, orbit: &PeriodicOrbit, depth: usize) -> Result<RotationInterval> {
    rotation_set(sft, &orbit_distance_potential(sft, orbit, depth)?)
}
