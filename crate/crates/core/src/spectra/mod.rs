//! Birkhoff spectra of locally constant potentials.
//!
//! The rotation interval comes from extreme cycle means of the block graph,
//! endpoint entropies from the critical subgraphs, and interior values from
//! the duality `E(a) = inf_t P(t phi) - t a`. Graphs are compared as
//! polylines in the Hausdorff metric.

mod demo;
mod hausdorff;
mod rotation;

use rayon::prelude::*;

use crate::convex::{linspace, CmsFunction};
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::sft::Sft;
use crate::thermo::{check_sft, Transfer};

pub use demo::{usc_failure_demo, UscReport, UscRow};
pub use hausdorff::{polyline_excess, polyline_hausdorff};
pub use rotation::{critical_subgraph_entropy, rotation_set, RotationInterval, Side};

/// Default half-width of the `t` range used by the duality infimum.
pub const DEFAULT_T_MAX: f64 = 60.0;

const CONCAVITY_TOL: f64 = 1e-9;

/// Sorted samples `(alpha, h(alpha))` of a spectrum graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGraph {
    points: Vec<(f64, f64)>,
}

impl SpectrumGraph {
    /// Checks ordering, finiteness, nonnegativity and concavity.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(Error::InvalidInput("non-finite spectrum point".into()));
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[0].0 < w[1].0) {
                return Err(Error::InvalidGrid(format!(
                    "alphas not strictly increasing at index {}",
                    i + 1
                )));
            }
        }
        for (i, p) in points.iter().enumerate() {
            if p.1 < -CONCAVITY_TOL {
                return Err(Error::NegativeValues { index: i, value: p.1 });
            }
        }
        for i in 1..points.len().saturating_sub(1) {
            let (a0, h0) = points[i - 1];
            let (a1, h1) = points[i];
            let (a2, h2) = points[i + 1];
            let chord = ((a2 - a1) * h0 + (a1 - a0) * h2) / (a2 - a0);
            if h1 < chord - CONCAVITY_TOL {
                return Err(Error::NotConcave {
                    index: i,
                    second_difference: chord - h1,
                });
            }
        }
        Ok(SpectrumGraph { points })
    }

    /// Raw samples: ordering and finiteness are checked, concavity is not.
    pub fn from_samples(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(Error::InvalidInput("non-finite spectrum point".into()));
        }
        if points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidGrid("alphas not strictly increasing".into()));
        }
        Ok(SpectrumGraph { points })
    }

    pub fn from_cms(h: &CmsFunction) -> Result<Self> {
        SpectrumGraph::new(
            h.base
                .x()
                .iter()
                .zip(h.base.values())
                .map(|(a, v)| (*a, *v))
                .collect(),
        )
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }

    /// Highest sample (lowest alpha on ties).
    pub fn max_point(&self) -> (f64, f64) {
        self.points
            .iter()
            .cloned()
            .fold((f64::NAN, f64::NEG_INFINITY), |best, p| if p.1 > best.1 { p } else { best })
    }

    /// Linear interpolation; `None` outside the domain.
    pub fn value_at(&self, alpha: f64) -> Option<f64> {
        let (lo, hi) = self.domain();
        if alpha < lo || alpha > hi {
            return None;
        }
        let i = self.points.partition_point(|p| p.0 < alpha);
        if i == 0 {
            return Some(self.points[0].1);
        }
        let (a0, h0) = self.points[i - 1];
        let (a1, h1) = self.points[i];
        Some(h0 + (h1 - h0) * (alpha - a0) / (a1 - a0))
    }

    /// `max over samples of h + t alpha`.
    pub fn sup_affine(&self, t: f64) -> f64 {
        self.points
            .iter()
            .map(|(a, h)| h + t * a)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn check_bounded(&self, h_top: f64) -> Result<()> {
        let top = self.max_point().1;
        if top > h_top + CONCAVITY_TOL {
            return Err(Error::MaxEntropyMismatch {
                expected: h_top,
                found: top,
            });
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        crate::io::csv_table(
            &["alpha", "entropy"],
            self.points.iter().map(|(a, h)| vec![*a, *h]),
        )
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (header, rows) = crate::io::parse_csv(text)?;
        if header.len() != 2 {
            return Err(Error::InvalidInput("spectrum CSV needs columns alpha,entropy".into()));
        }
        SpectrumGraph::new(rows.into_iter().map(|r| (r[0], r[1])).collect())
    }
}

/// Hausdorff distance between the polyline graphs.
pub fn spectrum_distance(a: &SpectrumGraph, b: &SpectrumGraph) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(polyline_hausdorff(&a.points, &b.points))
}

/// `sup_{p in a} dist(p, b)` over the polyline `a`.
pub fn one_sided_excess(a: &SpectrumGraph, b: &SpectrumGraph) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(polyline_excess(&a.points, &b.points))
}

/// Result of the duality minimization at one alpha.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityPoint {
    pub alpha: f64,
    pub value: f64,
    /// Minimizing `t` (infinite at the ends of the rotation interval).
    pub t_argmin: f64,
    /// The minimizer sits on `|t| = t_max`; the value is then the restricted
    /// infimum, an upper bound for the true spectrum.
    pub endpoint_regime: bool,
}

/// Precomputed data for evaluating the spectrum of one potential.
pub struct SpectrumEngine {
    transfer: Transfer,
    values: Vec<f64>,
    rotation: RotationInterval,
    t_grid: Vec<f64>,
    p_grid: Vec<f64>,
    t_max: f64,
    h_top: f64,
    alpha_star: f64,
    end_min: f64,
    end_max: f64,
    /// Parametric points at `s = -t_max` and `s = t_max`.
    outer: ((f64, f64), (f64, f64)),
}

fn duality_t_grid(t_max: f64) -> Vec<f64> {
    let inner = t_max.min(8.0);
    let mut pos: Vec<f64> = linspace(0.0, inner, 81);
    let mut t = inner;
    while t < t_max {
        t = (t * 1.25).min(t_max);
        pos.push(t);
    }
    let mut grid: Vec<f64> = pos.iter().skip(1).rev().map(|t| -t).collect();
    grid.extend(pos);
    grid
}

impl SpectrumEngine {
    pub fn new(sft: &Sft, phi: &Potential, t_max: f64) -> Result<Self> {
        check_sft(sft, phi)?;
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidInput(format!("t_max must be positive, got {t_max}")));
        }
        let transfer = Transfer::new(phi)?;
        let values = phi.values().to_vec();
        let rotation = rotation_set(sft, phi)?;
        let end_min = critical_subgraph_entropy(sft, phi, Side::Min)?;
        let end_max = critical_subgraph_entropy(sft, phi, Side::Max)?;
        let t_grid = duality_t_grid(t_max);
        let p_grid = t_grid
            .par_iter()
            .map(|&t| transfer.pressure_of(&values, t))
            .collect::<Result<Vec<_>>>()?;
        let (h_top, m) = transfer.equilibrium_of(&values, 0.0)?;
        let alpha_star = dot(&transfer.cylinder_masses(&m), &values);
        let outer_at = |s: f64| -> Result<(f64, f64)> {
            let (p, m) = transfer.equilibrium_of(&values, s)?;
            let a = dot(&transfer.cylinder_masses(&m), &values);
            Ok((a, (p - s * a).max(0.0)))
        };
        let outer = (outer_at(-t_max)?, outer_at(t_max)?);
        Ok(SpectrumEngine {
            transfer,
            values,
            rotation,
            t_grid,
            p_grid,
            t_max,
            h_top,
            alpha_star,
            end_min,
            end_max,
            outer,
        })
    }

    pub fn rotation(&self) -> &RotationInterval {
        &self.rotation
    }

    pub fn h_top(&self) -> f64 {
        self.h_top
    }

    /// `int phi d m_max`, where the spectrum peaks.
    pub fn alpha_star(&self) -> f64 {
        self.alpha_star
    }

    pub fn endpoint_values(&self) -> (f64, f64) {
        (self.end_min, self.end_max)
    }

    fn pressure(&self, t: f64) -> f64 {
        self.transfer
            .pressure_of(&self.values, t)
            .unwrap_or(f64::INFINITY)
    }

    /// Duality value at `alpha` (critical-graph entropy at the two ends).
    pub fn value_at(&self, alpha: f64) -> Result<DualityPoint> {
        let r = &self.rotation;
        let eps = 1e-14 * (1.0 + r.alpha_min.abs().max(r.alpha_max.abs()));
        if alpha < r.alpha_min - eps || alpha > r.alpha_max + eps {
            return Err(Error::InvalidInput(format!(
                "alpha {alpha} outside the rotation interval [{}, {}]",
                r.alpha_min, r.alpha_max
            )));
        }
        if r.is_degenerate() {
            return Ok(DualityPoint {
                alpha,
                value: self.h_top,
                t_argmin: 0.0,
                endpoint_regime: false,
            });
        }
        if (alpha - r.alpha_min).abs() <= eps {
            return Ok(DualityPoint {
                alpha,
                value: self.end_min,
                t_argmin: f64::NEG_INFINITY,
                endpoint_regime: false,
            });
        }
        if (alpha - r.alpha_max).abs() <= eps {
            return Ok(DualityPoint {
                alpha,
                value: self.end_max,
                t_argmin: f64::INFINITY,
                endpoint_regime: false,
            });
        }
        let g = |i: usize| self.p_grid[i] - self.t_grid[i] * alpha;
        let n = self.t_grid.len();
        let mut j = 0;
        for i in 1..n {
            if g(i) < g(j) {
                j = i;
            }
        }
        let lo = self.t_grid[j.saturating_sub(1)];
        let hi = self.t_grid[(j + 1).min(n - 1)];
        let (t_best, v_best) = golden_min(lo, hi, |t| self.pressure(t) - t * alpha);
        let (t_argmin, value) = if v_best < g(j) {
            (t_best, v_best)
        } else {
            (self.t_grid[j], g(j))
        };
        let endpoint_regime = (j == 0 || j == n - 1)
            && (t_argmin.abs() - self.t_max).abs() <= 1e-6 * self.t_max;
        // beyond the last parametric point the duality value is only an upper
        // bound; use the chord to the exact endpoint instead
        let (lo_pt, hi_pt) = self.outer;
        let value = if endpoint_regime && alpha < lo_pt.0 {
            let w = (alpha - r.alpha_min) / (lo_pt.0 - r.alpha_min);
            value.min(self.end_min + w * (lo_pt.1 - self.end_min))
        } else if endpoint_regime && alpha > hi_pt.0 {
            let w = (r.alpha_max - alpha) / (r.alpha_max - hi_pt.0);
            value.min(self.end_max + w * (hi_pt.1 - self.end_max))
        } else {
            value
        };
        Ok(DualityPoint {
            alpha,
            value: value.max(0.0),
            t_argmin,
            endpoint_regime,
        })
    }

    /// Exact spectrum point `(alpha(s), h(mu_s))` of the equilibrium state
    /// of `s phi`.
    pub fn parametric_point(&self, s: f64) -> Result<(f64, f64)> {
        let (p, m) = self.transfer.equilibrium_of(&self.values, s)?;
        let alpha = dot(&self.transfer.cylinder_masses(&m), &self.values);
        Ok((alpha, (p - s * alpha).max(0.0)))
    }

    /// Duality values at the given alphas (sorted ascending), in parallel.
    pub fn values_at(&self, alphas: &[f64]) -> Result<Vec<DualityPoint>> {
        alphas.par_iter().map(|&a| self.value_at(a)).collect()
    }

    /// Duality values on `n_alpha` uniform points of the rotation interval
    /// and nothing else, for comparison with targets on the same kind of grid.
    pub fn uniform_graph(&self, n_alpha: usize) -> Result<SpectrumGraph> {
        if n_alpha < 3 {
            return Err(Error::InvalidInput("n_alpha must be at least 3".into()));
        }
        let r = &self.rotation;
        if r.is_degenerate() {
            return SpectrumGraph::new(vec![(r.alpha_min, self.h_top)]);
        }
        let alphas = linspace(r.alpha_min, r.alpha_max, n_alpha);
        SpectrumGraph::new(self.values_at(&alphas)?.into_iter().map(|d| (d.alpha, d.value)).collect())
    }

    /// `n_alpha` uniform samples of the rotation interval, merged with
    /// parametric points `(alpha(s), h(mu_s))` for `|s| <= t_max` that
    /// resolve the steep parts of the graph. The point `s = 0` puts the
    /// maximum `(alpha*, h_top)` on the graph.
    pub fn graph(&self, n_alpha: usize) -> Result<SpectrumGraph> {
        if n_alpha < 3 {
            return Err(Error::InvalidInput("n_alpha must be at least 3".into()));
        }
        let r = &self.rotation;
        if r.is_degenerate() {
            return SpectrumGraph::new(vec![(r.alpha_min, self.h_top)]);
        }
        let alphas = linspace(r.alpha_min, r.alpha_max, n_alpha);
        let mut points: Vec<(f64, f64)> = self
            .values_at(&alphas)?
            .into_iter()
            .map(|d| (d.alpha, d.value))
            .collect();
        let mut s_list = vec![0.0];
        let mut s = 0.05;
        while s < self.t_max {
            s_list.push(s);
            s_list.push(-s);
            s *= 1.2;
        }
        s_list.push(self.t_max);
        s_list.push(-self.t_max);
        let extra: Vec<Option<(f64, f64)>> = s_list
            .par_iter()
            .map(|&s| self.parametric_point(s).ok())
            .collect();
        let margin = 1e-9 * (r.alpha_max - r.alpha_min);
        for p in extra.into_iter().flatten() {
            if p.0 > r.alpha_min + margin && p.0 < r.alpha_max - margin {
                points.push(p);
            }
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        let gap = 1e-9 * (r.alpha_max - r.alpha_min) / n_alpha as f64;
        for p in points {
            match merged.last_mut() {
                Some(last) if p.0 - last.0 <= gap => last.1 = last.1.max(p.1),
                _ => merged.push(p),
            }
        }
        SpectrumGraph::new(merged)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimum of a unimodal function on `[lo, hi]`.
fn golden_min(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if hi - lo <= 1e-10 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    let ends = [(lo, f(lo)), (hi, f(hi)), (x1, f1), (x2, f2)];
    ends.into_iter()
        .fold((f64::NAN, f64::INFINITY), |b, p| if p.1 < b.1 { p } else { b })
}

/// Spectrum graph of `phi` with `n_alpha` uniform samples of the rotation
/// interval. A constant potential gives the single point `(c, h_top)`.
pub fn entropy_spectrum(sft: &Sft, phi: &Potential, n_alpha: usize, t_max: f64) -> Result<SpectrumGraph> {
    SpectrumEngine::new(sft, phi, t_max)?.graph(n_alpha)
}

/// `e(Gamma(phi), Gamma(phi + psi / n))` for each `n`.
pub fn lsc_experiment(
    sft: &Sft,
    phi: &Potential,
    psi: &Potential,
    ns: &[usize],
    n_alpha: usize,
    t_max: f64,
) -> Result<Vec<(usize, f64)>> {
    let base = entropy_spectrum(sft, phi, n_alpha, t_max)?;
    ns.iter()
        .map(|&n| {
            let phi_n = phi.add_scaled(psi, 1.0 / n as f64)?;
            let g = entropy_spectrum(sft, &phi_n, n_alpha, t_max)?;
            Ok((n, one_sided_excess(&base, &g)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary_entropy(a: f64) -> f64 {
        let xlogx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
        -xlogx(a) - xlogx(1.0 - a)
    }

    #[test]
    fn first_symbol_spectrum_is_binary_entropy() {
        let full = Sft::full_shift(2);
        let phi = Potential::first_symbol(&full);
        let e = SpectrumEngine::new(&full, &phi, DEFAULT_T_MAX).unwrap();
        for i in 0..=180 {
            let a = 0.05 + 0.005 * i as f64;
            let v = e.value_at(a).unwrap();
            assert!((v.value - binary_entropy(a)).abs() < 1e-9, "{a}");
            assert!(!v.endpoint_regime);
        }
        let g = e.graph(101).unwrap();
        assert_eq!(g.points()[0], (0.0, 0.0));
        assert_eq!(*g.points().last().unwrap(), (1.0, 0.0));
        let (am, hm) = g.max_point();
        assert!((am - 0.5).abs() < 1e-12 && (hm - 2f64.ln()).abs() < 1e-12);
        for t in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let p = crate::thermo::pressure(&full, &phi, t).unwrap();
            assert!((g.sup_affine(t) - p).abs() < 1e-5);
        }
    }

    #[test]
    fn constant_potential_is_a_point() {
        let g = Sft::golden_mean();
        let phi = Potential::constant(&g, -0.4);
        let s = entropy_spectrum(&g, &phi, 11, 10.0).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.points()[0].0, -0.4);
        assert!((s.points()[0].1 - g.topological_entropy().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn forbidden_pair_endpoints() {
        let full = Sft::full_shift(2);
        let phi = Potential::negative_indicator(&full, &[1, 1]).unwrap();
        let s = entropy_spectrum(&full, &phi, 101, DEFAULT_T_MAX).unwrap();
        let gamma = (1.0 + 5f64.sqrt()) / 2.0;
        let last = *s.points().last().unwrap();
        assert_eq!(last.0, 0.0);
        assert!((last.1 - gamma.ln()).abs() < 1e-12);
        assert_eq!(s.points()[0], (-1.0, 0.0));
        let (am, hm) = s.max_point();
        assert!((am + 0.25).abs() < 1e-12 && (hm - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn distance_examples() {
        let a = SpectrumGraph::new(vec![(0.0, 0.0)]).unwrap();
        let b = SpectrumGraph::new(vec![(3.0, 4.0)]).unwrap();
        assert_eq!(spectrum_distance(&a, &b).unwrap(), 5.0);
        let full = Sft::full_shift(2);
        let g = entropy_spectrum(&full, &Potential::first_symbol(&full), 201, 40.0).unwrap();
        assert_eq!(spectrum_distance(&g, &g).unwrap(), 0.0);
        let eps = 1e-3;
        let up = SpectrumGraph::new(g.points().iter().map(|(a, h)| (*a, h + eps)).collect()).unwrap();
        let d = spectrum_distance(&g, &up).unwrap();
        assert!((d - eps).abs() < 1e-4 * eps, "{d}");
        let top = SpectrumGraph::new(vec![(0.0, 1.0), (1.0, 1.5), (2.0, 1.0)]).unwrap();
        assert!((one_sided_excess(&a, &top).unwrap() - 1.0).abs() < 1e-15);
        let e1 = one_sided_excess(&g, &up).unwrap();
        let e2 = one_sided_excess(&up, &g).unwrap();
        assert_eq!(e1.max(e2), d);
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(matches!(SpectrumGraph::new(vec![]), Err(Error::EmptyGraph)));
        assert!(SpectrumGraph::new(vec![(0.0, 0.0), (0.0, 1.0)]).is_err());
        assert!(matches!(
            SpectrumGraph::new(vec![(0.0, 1.0), (1.0, 0.0), (2.0, 1.0)]),
            Err(Error::NotConcave { .. })
        ));
    }

    #[test]
    fn csv_roundtrip() {
        let g = SpectrumGraph::new(vec![(0.0, 0.0), (0.5, std::f64::consts::LN_2), (1.0, 0.0)]).unwrap();
        let back = SpectrumGraph::from_csv(&g.to_csv()).unwrap();
        assert_eq!(g, back);
    }
}
