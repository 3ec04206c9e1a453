//! Inverse problems: locally constant potentials with a prescribed pressure
//! function or entropy spectrum.
//!
//! The unknown is the table `theta` of a depth-`k` potential. The residuals
//! `r_i = P(t_i theta) - F(t_i)` at the evaluation points are combined by a
//! log-sum-exp of `+-r_i` with sharpness `BETA`, a smooth stand-in for
//! `max |r_i|` that is minimized exactly at `r = 0` when the target is
//! attainable. The gradient of each residual is exact: `t_i` times the
//! equilibrium masses of the table's cylinders. Steps solve a damped
//! Gauss-Newton system and are accepted by Armijo backtracking, so the
//! objective never increases.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::convex::{kink_at, supporting_intercepts, CmsFunction, GridFunction};
use crate::error::{Error, Result};
use crate::oracle::{enumerate_orbits, OrbitCatalog};
use crate::potential::{PeriodicOrbit, Potential};
use crate::sft::Sft;
use crate::spectra::{
    rotation_set, SpectrumEngine, spectrum_distance, RotationInterval, SpectrumGraph, DEFAULT_T_MAX,
};
use crate::thermo::Transfer;

const BETA: f64 = 1e3;
const ARMIJO: f64 = 1e-4;
/// Largest kink `|jump of second difference| / h` accepted at `t = 0`.
const KINK_TOL: f64 = 1e-4;
const WITNESS_GAP: f64 = 1e-6;
const WITNESS_PERIOD: usize = 12;
const MASS_FLOOR: f64 = 1e-8;

/// `n` Chebyshev points on `[a, b]`, ascending.
pub fn chebyshev_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut t: Vec<f64> = (0..n)
        .map(|i| {
            let c = (std::f64::consts::PI * (2 * i + 1) as f64 / (2 * n) as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * c
        })
        .collect();
    t.reverse();
    t
}

#[derive(Debug, Clone)]
pub struct RealizeOptions {
    pub t_eval: Vec<f64>,
    /// Sup-norm tolerance on the pressure residuals.
    pub tol: f64,
    pub seed: u64,
    /// Number of deterministic starts (`seed`, `seed + 1`, ...).
    pub starts: usize,
    pub max_iter: usize,
    /// Extra start, lifted to the fitting depth.
    pub warm_start: Option<Potential>,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        RealizeOptions {
            t_eval: chebyshev_points(-20.0, 20.0, 41),
            tol: 1e-8,
            seed: 7,
            starts: 3,
            max_iter: 400,
            warm_start: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RealizationResult {
    pub potential: Potential,
    /// Sup-norm mismatch on the comparison grid (pressure residuals, or d_ms
    /// for spectrum targets).
    pub target_error: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Seed of the start that produced this result.
    pub seed: u64,
    /// Smoothed objective after every accepted step.
    pub history: Vec<f64>,
}

struct Problem<'a> {
    tr: Transfer,
    template: Potential,
    targets: &'a [(f64, f64)],
}

struct Eval {
    objective: f64,
    max_abs: f64,
    grad: DVector<f64>,
    hess: DMatrix<f64>,
}

fn lse(res: &[f64]) -> (f64, f64, Vec<(f64, f64)>) {
    let zmax = res.iter().map(|r| r.abs()).fold(0.0, f64::max);
    let mut weights = Vec::with_capacity(res.len());
    let mut total = 0.0;
    for &r in res {
        let wp = (BETA * (r - zmax)).exp();
        let wm = (BETA * (-r - zmax)).exp();
        total += wp + wm;
        weights.push((wp, wm));
    }
    for w in &mut weights {
        w.0 /= total;
        w.1 /= total;
    }
    (zmax + total.ln() / BETA, zmax, weights)
}

impl Problem<'_> {
    fn objective(&self, theta: &[f64]) -> f64 {
        let res: Option<Vec<f64>> = self
            .targets
            .iter()
            .map(|&(t, y)| self.tr.pressure_of(theta, t).ok().map(|p| p - y))
            .collect();
        match res {
            Some(r) if r.iter().all(|x| x.is_finite()) => lse(&r).0,
            _ => f64::INFINITY,
        }
    }

    fn evaluate(&self, theta: &[f64]) -> Result<Eval> {
        let n = theta.len();
        let mut res = Vec::with_capacity(self.targets.len());
        let mut grads = Vec::with_capacity(self.targets.len());
        for &(t, y) in self.targets {
            let (p, m) = self.tr.equilibrium_of(theta, t)?;
            let mass = self.tr.cylinder_masses(&m);
            res.push(p - y);
            grads.push(DVector::from_iterator(n, mass.iter().map(|x| t * x)));
        }
        let (objective, max_abs, w) = lse(&res);
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        for (gi, (wp, wm)) in grads.iter().zip(&w) {
            grad.axpy(wp - wm, gi, 1.0);
            hess.ger(BETA * (wp + wm), gi, gi, 1.0);
        }
        hess.ger(-BETA, &grad, &grad, 1.0);
        Ok(Eval {
            objective,
            max_abs,
            grad,
            hess,
        })
    }

    fn potential(&self, theta: &[f64]) -> Result<Potential> {
        self.template.with_values(theta.to_vec())
    }
}

fn solve(hess: &DMatrix<f64>, grad: &DVector<f64>, lambda: f64) -> Option<DVector<f64>> {
    let n = grad.len();
    let m = hess + DMatrix::identity(n, n) * lambda;
    m.cholesky().map(|c| -c.solve(grad))
}

/// One optimizer run from a given start.
fn descend(problem: &Problem<'_>, start: Vec<f64>, opts: &RealizeOptions, seed: u64) -> Result<RealizationResult> {
    let mut theta = start;
    let mut cur = problem.evaluate(&theta)?;
    let mut history = vec![cur.objective];
    let scale = cur.hess.diagonal().iter().cloned().fold(0.0, f64::max).max(1e-12);
    let mut lambda = 1e-6 * scale;
    let mut iterations = 0;
    while iterations < opts.max_iter && cur.max_abs > opts.tol {
        iterations += 1;
        let slope_of = |d: &DVector<f64>| cur.grad.dot(d);
        let mut accepted = None;
        for _ in 0..8 {
            let dir = match solve(&cur.hess, &cur.grad, lambda) {
                Some(d) if slope_of(&d) < 0.0 => d,
                _ => {
                    lambda *= 100.0;
                    continue;
                }
            };
            if let Some(step) = backtrack(problem, &theta, &dir, cur.objective, slope_of(&dir)) {
                accepted = Some(step);
                lambda = (lambda / 3.0).max(1e-15 * scale);
                break;
            }
            lambda *= 100.0;
        }
        if accepted.is_none() {
            // steepest descent as the last resort
            let dir = -cur.grad.clone();
            accepted = backtrack(problem, &theta, &dir, cur.objective, slope_of(&dir));
        }
        let Some(next) = accepted else { break };
        theta = next;
        cur = problem.evaluate(&theta)?;
        history.push(cur.objective);
    }
    Ok(RealizationResult {
        potential: problem.potential(&theta)?,
        target_error: cur.max_abs,
        iterations,
        converged: cur.max_abs <= opts.tol,
        seed,
        history,
    })
}

fn backtrack(problem: &Problem<'_>, theta: &[f64], dir: &DVector<f64>, f0: f64, slope: f64) -> Option<Vec<f64>> {
    if !(slope < 0.0) {
        return None;
    }
    let mut a = 1.0;
    while a > 1e-12 {
        let trial: Vec<f64> = theta.iter().zip(dir.iter()).map(|(x, d)| x + a * d).collect();
        let f = problem.objective(&trial);
        if f <= f0 + ARMIJO * a * slope {
            return Some(trial);
        }
        a *= 0.5;
    }
    None
}

fn table_template(sft: &Sft, depth: usize) -> Result<Potential> {
    Potential::from_fn(sft, depth, |_| 0.0)
}

/// Multi-start fit of `(t, F(t))` pairs. Starts draw the table uniformly
/// from `[lo, hi]`; the lowest error wins, ties to the lowest seed.
pub fn realize_targets(
    sft: &Sft,
    targets: &[(f64, f64)],
    depth: usize,
    range: (f64, f64),
    opts: &RealizeOptions,
) -> Result<RealizationResult> {
    if targets.is_empty() {
        return Err(Error::InvalidInput("no evaluation points".into()));
    }
    let template = table_template(sft, depth)?;
    let problem = Problem {
        tr: Transfer::new(&template)?,
        template,
        targets,
    };
    let mut starts: Vec<(u64, Vec<f64>)> = (0..opts.starts.max(1) as u64)
        .map(|i| {
            let seed = opts.seed.wrapping_add(i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (lo, hi) = range;
            let start = (0..problem.template.len())
                .map(|_| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
                .collect();
            (seed, start)
        })
        .collect();
    if let Some(w) = &opts.warm_start {
        if w.sft() != sft || w.depth() > problem.template.depth() {
            return Err(Error::InvalidInput("warm start does not fit the table".into()));
        }
        // seed field of a warm run is the base seed
        starts.insert(0, (opts.seed, w.lift(problem.template.depth())?.values().to_vec()));
    }
    let runs = starts
        .into_par_iter()
        .map(|(seed, start)| descend(&problem, start, opts, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(runs
        .into_iter()
        .reduce(|best, r| if r.target_error < best.target_error { r } else { best })
        .expect("at least one start"))
}

fn violation(hypothesis: &str, measured: f64, tol: f64) -> Error {
    Error::HypothesisViolation {
        hypothesis: hypothesis.to_string(),
        measured,
        tol,
    }
}

/// Checks that `F` can be the pressure function of a potential on `sft`:
/// convex, `F(0) = h_top`, supporting-line intercepts in `[0, h_top]`, and
/// no kink at the origin.
pub fn check_pressure_hypotheses(sft: &Sft, f: &GridFunction, tol: f64) -> Result<()> {
    f.check_convex()?;
    let h_top = sft.topological_entropy()?;
    let (lo, hi) = f.domain();
    if !(lo < 0.0 && hi > 0.0) {
        return Err(violation("F defined around t = 0", lo.max(-hi), 0.0));
    }
    let f0 = f.eval_cubic(0.0);
    let tol_h = tol.max(1e-9);
    if (f0 - h_top).abs() > tol_h {
        return Err(violation("F(0) = h_top", f0 - h_top, tol_h));
    }
    let (imin, imax) = supporting_intercepts(f)?;
    if imin < -tol_h {
        return Err(violation("intercepts >= 0", imin, tol_h));
    }
    if imax > h_top + tol_h {
        return Err(violation("intercepts <= h_top", imax - h_top, tol_h));
    }
    let kink = kink_at(f, 0.0);
    if kink > KINK_TOL {
        return Err(violation("F differentiable at 0", kink, KINK_TOL));
    }
    Ok(())
}

/// Fits `P(t phi) = F(t)` on `opts.t_eval`.
pub fn realize_pressure(sft: &Sft, f: &GridFunction, depth: usize, opts: &RealizeOptions) -> Result<RealizationResult> {
    check_pressure_hypotheses(sft, f, opts.tol)?;
    let (lo, hi) = f.domain();
    if opts.t_eval.iter().any(|t| *t < lo || *t > hi) {
        return Err(Error::InvalidInput("t_eval leaves the domain of F".into()));
    }
    let targets: Vec<(f64, f64)> = opts.t_eval.iter().map(|&t| (t, f.eval_cubic(t))).collect();
    let s = f.slopes();
    realize_targets(sft, &targets, depth, (s[0], s[s.len() - 1]), opts)
}

/// `F = (-h)*` evaluated at `t`: `sup_a (t a + h(a))`.
pub fn pressure_of_spectrum(h: &CmsFunction, t: f64) -> f64 {
    h.base.negated().conjugate_at(t)
}

#[derive(Debug, Clone)]
pub struct SpectrumRealization {
    /// `target_error` is d_ms between realized and target graphs.
    pub result: RealizationResult,
    /// Sup-norm pressure residual reached by the optimizer.
    pub pressure_error: f64,
    pub realized: SpectrumGraph,
    pub target: SpectrumGraph,
    pub rotation: RotationInterval,
    pub target_domain: (f64, f64),
}

fn check_max_entropy(sft: &Sft, h: &CmsFunction, tol: f64) -> Result<f64> {
    let h_top = sft.topological_entropy()?;
    if (h.max_value - h_top).abs() > tol.max(1e-9) {
        return Err(Error::MaxEntropyMismatch {
            expected: h_top,
            found: h.max_value,
        });
    }
    Ok(h_top)
}

fn spectrum_targets(h: &CmsFunction, opts: &RealizeOptions) -> Vec<(f64, f64)> {
    opts.t_eval.iter().map(|&t| (t, pressure_of_spectrum(h, t))).collect()
}

fn finish_spectrum(sft: &Sft, h: &CmsFunction, fit: RealizationResult, tol: f64) -> Result<SpectrumRealization> {
    let target = SpectrumGraph::from_cms(h)?;
    let n_alpha = h.base.len().max(3);
    let realized = SpectrumEngine::new(sft, &fit.potential, DEFAULT_T_MAX)?.uniform_graph(n_alpha)?;
    let d = spectrum_distance(&realized, &target)?;
    let rotation = rotation_set(sft, &fit.potential)?;
    Ok(SpectrumRealization {
        pressure_error: fit.target_error,
        result: RealizationResult {
            target_error: d,
            converged: d <= tol,
            ..fit
        },
        realized,
        target,
        rotation,
        target_domain: h.domain(),
    })
}

/// Fits the pressure `(-h)*` of a C_ms target and measures d_ms between the
/// spectrum of the result and `h`.
pub fn realize_spectrum(sft: &Sft, h: &CmsFunction, depth: usize, tol: f64, opts: &RealizeOptions) -> Result<SpectrumRealization> {
    check_max_entropy(sft, h, tol)?;
    let targets = spectrum_targets(h, opts);
    let fit = realize_targets(sft, &targets, depth, h.domain(), opts)?;
    finish_spectrum(sft, h, fit, tol)
}

/// `realize_spectrum` at each depth in turn (ascending), every fit warm
/// starting the next.
pub fn realize_spectrum_depths(
    sft: &Sft,
    h: &CmsFunction,
    depths: &[usize],
    tol: f64,
    opts: &RealizeOptions,
) -> Result<Vec<SpectrumRealization>> {
    let mut out: Vec<SpectrumRealization> = Vec::with_capacity(depths.len());
    for &k in depths {
        let run_opts = RealizeOptions {
            warm_start: out.last().map(|r| r.result.potential.clone()),
            ..opts.clone()
        };
        out.push(realize_spectrum(sft, h, k, tol, &run_opts)?);
    }
    Ok(out)
}

/// Periodic orbits on which the averages of `phi - psi` differ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohomologyWitness {
    #[serde(serialize_with = "orbit_string")]
    pub orbit1: PeriodicOrbit,
    #[serde(serialize_with = "orbit_string")]
    pub orbit2: PeriodicOrbit,
    pub avg1: f64,
    pub avg2: f64,
}

fn orbit_string<S: serde::Serializer>(o: &PeriodicOrbit, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&o.to_string())
}

impl CohomologyWitness {
    /// Recomputes both averages and checks the separation.
    pub fn verify(&self, phi: &Potential, psi: &Potential) -> Result<bool> {
        let d = phi.add_scaled(psi, -1.0)?;
        let a1 = d.birkhoff_average(&self.orbit1)?;
        let a2 = d.birkhoff_average(&self.orbit2)?;
        Ok((a1 - a2).abs() > WITNESS_GAP)
    }
}

fn witness_in(catalog: &OrbitCatalog, phi: &Potential, psi: &Potential) -> Result<Option<CohomologyWitness>> {
    if phi.sft() != psi.sft() {
        return Err(Error::SftMismatch);
    }
    let d = phi.add_scaled(psi, -1.0)?;
    let ((lo, o1), (hi, o2)) = catalog.extreme_averages(&d)?;
    if hi - lo > WITNESS_GAP {
        Ok(Some(CohomologyWitness {
            orbit1: o1,
            orbit2: o2,
            avg1: lo,
            avg2: hi,
        }))
    } else {
        Ok(None)
    }
}

/// Two periodic orbits (periods at most `max_period`) separating the
/// averages of `phi - psi` by more than `1e-6`, or `None` when every orbit
/// gives the same average (as for cohomologous potentials up to a constant).
pub fn cohomology_witness(phi: &Potential, psi: &Potential, max_period: usize) -> Result<Option<CohomologyWitness>> {
    if phi.sft() != psi.sft() {
        return Err(Error::SftMismatch);
    }
    let catalog = enumerate_orbits(phi.sft(), max_period)?;
    witness_in(&catalog, phi, psi)
}

#[derive(Debug, Clone, Serialize)]
pub struct PairWitness {
    pub i: usize,
    pub j: usize,
    /// `None` marks an unresolved pair.
    pub witness: Option<CohomologyWitness>,
    pub d_ms: f64,
}

#[derive(Debug, Clone)]
pub struct ManyRealization {
    pub results: Vec<SpectrumRealization>,
    pub pairs: Vec<PairWitness>,
    /// Starts tried before `results` was filled.
    pub attempts: usize,
}

impl ManyRealization {
    pub fn all_resolved(&self) -> bool {
        self.pairs.iter().all(|p| p.witness.is_some())
    }
}

/// Cylinders whose equilibrium mass stays below `1e-8` at every evaluation
/// temperature.
fn silent_cylinders(fit: &RealizationResult, t_eval: &[f64]) -> Result<Vec<usize>> {
    let tr = Transfer::new(&fit.potential)?;
    let n = fit.potential.len();
    let mut quiet = vec![true; n];
    for &t in t_eval {
        let (_, m) = tr.equilibrium_of(fit.potential.values(), t)?;
        for (q, mass) in quiet.iter_mut().zip(tr.cylinder_masses(&m)) {
            if mass >= MASS_FLOOR {
                *q = false;
            }
        }
    }
    Ok((0..n).filter(|&i| quiet[i]).collect())
}

/// `n` realizations of the same spectrum, pairwise certified
/// non-cohomologous where possible.
///
/// Starts are taken from successive seed blocks; a new fit is kept only if
/// periodic orbits separate it from every fit kept so far. When seeds stop
/// producing new classes, an accepted fit is lowered by a small amount on
/// cylinders that carry no equilibrium mass at any evaluation temperature,
/// which leaves the fitted pressures unchanged but moves periodic averages.
pub fn realize_many(
    sft: &Sft,
    h: &CmsFunction,
    depth: usize,
    n: usize,
    tol: f64,
    opts: &RealizeOptions,
) -> Result<ManyRealization> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    check_max_entropy(sft, h, tol)?;
    let catalog = enumerate_orbits(sft, WITNESS_PERIOD)?;
    let targets = spectrum_targets(h, opts);
    let block = opts.starts.max(1) as u64;
    let max_attempts = 8 * n;
    let mut kept: Vec<RealizationResult> = Vec::new();
    let mut attempts = 0;
    while kept.len() < n && attempts < max_attempts {
        let run_opts = RealizeOptions {
            seed: opts.seed.wrapping_add(block * attempts as u64),
            ..opts.clone()
        };
        attempts += 1;
        let fit = realize_targets(sft, &targets, depth, h.domain(), &run_opts)?;
        if distinct_from_all(&catalog, &fit.potential, &kept)? {
            kept.push(fit);
        }
    }
    let mut bump = 1;
    while kept.len() < n && !kept.is_empty() && bump <= 4 * n {
        let base = &kept[0];
        let sites = silent_cylinders(base, &opts.t_eval)?;
        if sites.is_empty() {
            break;
        }
        let mut values = base.potential.values().to_vec();
        for (r, &i) in sites.iter().enumerate() {
            values[i] -= 1e-3 * (bump + r) as f64;
        }
        bump += 1;
        let potential = base.potential.with_values(values)?;
        if distinct_from_all(&catalog, &potential, &kept)? {
            let residual = targets
                .iter()
                .map(|&(t, y)| Ok((crate::thermo::pressure(sft, &potential, t)? - y).abs()))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            kept.push(RealizationResult {
                potential,
                target_error: residual,
                converged: residual <= opts.tol,
                ..base.clone()
            });
        }
    }
    let results = kept
        .into_iter()
        .map(|fit| finish_spectrum(sft, h, fit, tol))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            let (a, b) = (&results[i], &results[j]);
            pairs.push(PairWitness {
                i,
                j,
                witness: witness_in(&catalog, &a.result.potential, &b.result.potential)?,
                d_ms: spectrum_distance(&a.realized, &b.realized)?,
            });
        }
    }
    Ok(ManyRealization {
        results,
        pairs,
        attempts,
    })
}

fn distinct_from_all(catalog: &OrbitCatalog, phi: &Potential, kept: &[RealizationResult]) -> Result<bool> {
    for k in kept {
        if witness_in(catalog, phi, &k.potential)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}
