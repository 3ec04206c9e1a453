//! Explicit failure of upper semicontinuity of the spectrum map.
//!
//! `phi = -1[x0 x1 = 11]` has maximizing measures of entropy up to
//! `log golden`, so its graph ends at `(0, log gamma)`. The perturbation
//! `psi = -1[x0 = 1]` has the single maximizing measure at the fixed point
//! `0`, and so does every `phi_t = (1 - t) phi + t psi` with `t > 0`. Their
//! graphs therefore end at `(0, 0)`, which stays a fixed distance `delta`
//! from the graph of `phi` however small `t` is.

use serde::Serialize;

use super::{entropy_spectrum, one_sided_excess, SpectrumGraph, DEFAULT_T_MAX};
use crate::error::{Error, Result};
use crate::potential::{affine_combine, Potential};
use crate::sft::Sft;

const N_ALPHA: usize = 201;

#[derive(Debug, Clone, Serialize)]
pub struct UscRow {
    pub t: f64,
    /// `e(Gamma(phi_t), Gamma(phi))`
    pub excess_upper: f64,
    /// `e(Gamma(phi), Gamma(phi_t))`
    pub excess_lower: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UscReport {
    pub phi: String,
    pub psi: String,
    pub delta: f64,
    pub rows: Vec<UscRow>,
    /// Every `t > 0` has `excess_upper >= delta - 1e-6`.
    pub upper_gap_persists: bool,
    /// `excess_lower` strictly decreases as `t` decreases.
    pub lower_excess_decreasing: bool,
    #[serde(skip)]
    pub base_graph: Option<SpectrumGraph>,
    #[serde(skip)]
    pub graphs: Vec<SpectrumGraph>,
}

impl UscReport {
    pub fn to_json(&self) -> String {
        crate::io::to_json(self)
    }
}

/// Runs the construction for each `t` in `t_list` (all in `[0, 1]`).
///
/// Small `t` pushes the interesting part of the graph of `phi_t` out to
/// large temperatures, so the duality range grows like `1 / t`.
pub fn usc_failure_demo(sft: &Sft, t_list: &[f64]) -> Result<UscReport> {
    if sft != &Sft::full_shift(2) {
        return Err(Error::InvalidInput("the demo runs on the full 2-shift".into()));
    }
    let phi = Potential::negative_indicator(sft, &[1, 1])?;
    let psi = Potential::negative_indicator(sft, &[1])?;
    let base = entropy_spectrum(sft, &phi, N_ALPHA, DEFAULT_T_MAX)?;
    let origin = SpectrumGraph::new(vec![(0.0, 0.0)])?;
    let delta = one_sided_excess(&origin, &base)?;

    let mut rows = Vec::with_capacity(t_list.len());
    let mut graphs = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let phi_t = affine_combine(&phi, &psi, t)?;
        let t_max = if t > 0.0 { DEFAULT_T_MAX.max(DEFAULT_T_MAX / t) } else { DEFAULT_T_MAX };
        let g = entropy_spectrum(sft, &phi_t, N_ALPHA, t_max)?;
        rows.push(UscRow {
            t,
            excess_upper: one_sided_excess(&g, &base)?,
            excess_lower: one_sided_excess(&base, &g)?,
            delta,
        });
        graphs.push(g);
    }
    let upper_gap_persists = rows
        .iter()
        .filter(|r| r.t > 0.0)
        .all(|r| r.excess_upper >= delta - 1e-6);
    let mut by_t: Vec<&UscRow> = rows.iter().collect();
    by_t.sort_by(|a, b| b.t.total_cmp(&a.t));
    let lower_excess_decreasing = by_t
        .windows(2)
        .all(|w| w[1].excess_lower < w[0].excess_lower);
    Ok(UscReport {
        phi: "-1[x0 x1 = 11]".into(),
        psi: "-1[x0 = 1]".into(),
        delta,
        rows,
        upper_gap_persists,
        lower_excess_decreasing,
        base_graph: Some(base),
        graphs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_perturbation_has_no_excess() {
        let r = usc_failure_demo(&Sft::full_shift(2), &[0.0]).unwrap();
        assert_eq!(r.rows[0].excess_upper, 0.0);
        assert_eq!(r.rows[0].excess_lower, 0.0);
        assert!(r.delta > 0.3);
    }

    #[test]
    fn other_shifts_rejected() {
        assert!(usc_failure_demo(&Sft::golden_mean(), &[0.1]).is_err());
    }
}
