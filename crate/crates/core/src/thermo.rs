//! Transfer-matrix thermodynamics for locally constant potentials.
//!
//! A depth-`k` potential lives on the edges of the block graph whose
//! vertices are admissible `m`-words, `m = max(k - 1, 1)`, and whose edges
//! are admissible `(m + 1)`-words. The pressure of `t * phi` is the log
//! Perron root of the edge-weighted adjacency matrix, and the equilibrium
//! state is the Markov chain obtained from its left and right Perron
//! vectors.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perron::{perron_pair, Dense};
use crate::potential::{PeriodicOrbit, Potential};
use crate::sft::{Sft, Word};

#[derive(Debug, Clone)]
struct Edge {
    from: usize,
    to: usize,
    table_index: usize,
}

/// Block graph of an SFT at the resolution required by a potential layout.
#[derive(Debug, Clone)]
pub struct Transfer {
    sft: Sft,
    depth: usize,
    block: usize,
    vertices: Vec<Word>,
    lookup: Vec<u32>,
    edges: Vec<Edge>,
    table_len: usize,
}

fn code(alphabet: usize, w: &[u32]) -> usize {
    w.iter().fold(0usize, |acc, &s| acc * alphabet + s as usize)
}

impl Transfer {
    /// Graph for potentials shaped like `phi` (same SFT and depth).
    pub fn new(phi: &Potential) -> Result<Self> {
        let sft = phi.sft().clone();
        sft.require_primitive()?;
        let depth = phi.depth();
        let block = depth.saturating_sub(1).max(1);
        let a = sft.alphabet_size();
        let vertices = sft.words(block);
        let mut lookup = vec![u32::MAX; a.pow(block as u32)];
        for (i, v) in vertices.iter().enumerate() {
            lookup[code(a, v.symbols())] = i as u32;
        }
        let mut edges = Vec::new();
        for (from, v) in vertices.iter().enumerate() {
            let last = *v.symbols().last().unwrap();
            for b in sft.successors(last) {
                let mut word: Vec<u32> = v.symbols().to_vec();
                word.push(b);
                let to = lookup[code(a, &word[1..])] as usize;
                let table_index = phi
                    .index_of(&word[..depth])
                    .expect("edge prefix is admissible");
                edges.push(Edge {
                    from,
                    to,
                    table_index,
                });
            }
        }
        Ok(Transfer {
            sft,
            depth,
            block,
            vertices,
            lookup,
            edges,
            table_len: phi.len(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    fn check(&self, phi: &Potential) -> Result<()> {
        if phi.sft() != &self.sft {
            return Err(Error::SftMismatch);
        }
        if phi.depth() != self.depth {
            return Err(Error::InvalidInput("potential depth differs from transfer layout".into()));
        }
        Ok(())
    }

    /// Weighted matrix `exp(t * values - shift)` and the shift used.
    fn weighted(&self, values: &[f64], t: f64) -> (Dense, f64) {
        let shift = self
            .edges
            .iter()
            .map(|e| t * values[e.table_index])
            .fold(f64::NEG_INFINITY, f64::max);
        let mut m = Dense::zeros(self.vertices.len());
        for e in &self.edges {
            m.add_to(e.from, e.to, (t * values[e.table_index] - shift).exp());
        }
        (m, shift)
    }

    /// `P(t * phi)` for a table laid out like the constructing potential.
    pub fn pressure_of(&self, values: &[f64], t: f64) -> Result<f64> {
        let (m, shift) = self.weighted(values, t);
        let p = perron_pair(&m).ok_or(Error::NotPrimitive)?;
        Ok(p.log_lambda + shift)
    }

    /// Pressure and equilibrium Markov measure of `t * values`.
    pub fn equilibrium_of(&self, values: &[f64], t: f64) -> Result<(f64, MarkovMeasure)> {
        let (m, shift) = self.weighted(values, t);
        let pair = perron_pair(&m).ok_or(Error::NotPrimitive)?;
        let n = m.dim();
        let mut stochastic = Dense::zeros(n);
        for a in 0..n {
            let mut row: Vec<f64> = (0..n).map(|b| m.get(a, b) * pair.right[b]).collect();
            let mut sum: f64 = row.iter().sum();
            if !(sum > 0.0) {
                row = (0..n).map(|b| m.get(a, b)).collect();
                sum = row.iter().sum();
            }
            if !(sum > 0.0) {
                row = (0..n)
                    .map(|b| if self.has_edge(a, b) { 1.0 } else { 0.0 })
                    .collect();
                sum = row.iter().sum();
            }
            for (b, v) in row.into_iter().enumerate() {
                stochastic.set(a, b, v / sum);
            }
        }
        let mut stationary: Vec<f64> = pair
            .left
            .iter()
            .zip(&pair.right)
            .map(|(l, r)| l * r)
            .collect();
        let total: f64 = stationary.iter().sum();
        for x in &mut stationary {
            *x /= total;
        }
        let measure = MarkovMeasure {
            sft: self.sft.clone(),
            block: self.block,
            vertices: self.vertices.clone(),
            lookup: self.lookup.clone(),
            stochastic,
            stationary,
        };
        Ok((pair.log_lambda + shift, measure))
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.iter().any(|e| e.from == a && e.to == b)
    }

    /// Equilibrium masses of the table's cylinders, aligned with the table.
    pub fn cylinder_masses(&self, measure: &MarkovMeasure) -> Vec<f64> {
        let mut masses = vec![0.0; self.table_len];
        for e in &self.edges {
            masses[e.table_index] +=
                measure.stationary[e.from] * measure.stochastic.get(e.from, e.to);
        }
        masses
    }

    /// Pressure together with its gradient in the table coordinates,
    /// `d/d values[w] P(t * values) = t * mu_t([w])`.
    pub fn pressure_and_gradient(&self, values: &[f64], t: f64) -> Result<(f64, Vec<f64>)> {
        let (p, m) = self.equilibrium_of(values, t)?;
        let masses = self.cylinder_masses(&m);
        Ok((p, masses.into_iter().map(|x| t * x).collect()))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `(from, to, table index)` per edge.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.edges.iter().map(|e| (e.from, e.to, e.table_index))
    }

    pub fn vertices(&self) -> &[Word] {
        &self.vertices
    }
}

/// Stationary Markov chain on the block graph of an SFT.
#[derive(Debug, Clone)]
pub struct MarkovMeasure {
    sft: Sft,
    block: usize,
    vertices: Vec<Word>,
    lookup: Vec<u32>,
    stochastic: Dense,
    stationary: Vec<f64>,
}

impl MarkovMeasure {
    pub fn sft(&self) -> &Sft {
        &self.sft
    }

    /// Length of the words the chain moves on.
    pub fn block(&self) -> usize {
        self.block
    }

    pub fn vertices(&self) -> &[Word] {
        &self.vertices
    }

    pub fn stochastic(&self) -> &Dense {
        &self.stochastic
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    fn vertex(&self, w: &[u32]) -> Option<usize> {
        if w.iter().any(|&s| s as usize >= self.sft.alphabet_size()) {
            return None;
        }
        match self.lookup[code(self.sft.alphabet_size(), w)] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }

    /// The invariant measure equidistributed on a periodic orbit, written
    /// as a chain on `block`-words. Exact for cylinders of length up to
    /// `block + 1`.
    pub fn periodic(sft: &Sft, orbit: &PeriodicOrbit, block: usize) -> Result<Self> {
        orbit.check_on(sft)?;
        let block = block.max(1);
        let a = sft.alphabet_size();
        let vertices = sft.words(block);
        let mut lookup = vec![u32::MAX; a.pow(block as u32)];
        for (i, v) in vertices.iter().enumerate() {
            lookup[code(a, v.symbols())] = i as u32;
        }
        let n = vertices.len();
        let p = orbit.period();
        let window = |r: usize| -> usize {
            let w: Vec<u32> = (0..block).map(|i| orbit.symbol(r, i)).collect();
            lookup[code(a, &w)] as usize
        };
        let mut counts = Dense::zeros(n);
        let mut stationary = vec![0.0; n];
        for r in 0..p {
            let (u, v) = (window(r), window((r + 1) % p));
            counts.add_to(u, v, 1.0);
            stationary[u] += 1.0 / p as f64;
        }
        let is_edge = |u: &Word, v: &Word| {
            let (u, v) = (u.symbols(), v.symbols());
            u[1..] == v[..block - 1] && sft.allows(u[block - 1], v[block - 1])
        };
        let mut stochastic = Dense::zeros(n);
        for u in 0..n {
            let row: f64 = (0..n).map(|v| counts.get(u, v)).sum();
            if row > 0.0 {
                for v in 0..n {
                    stochastic.set(u, v, counts.get(u, v) / row);
                }
            } else {
                // off the orbit: any stochastic row will do, the vertex has no mass
                let succ: Vec<usize> = (0..n).filter(|&v| is_edge(&vertices[u], &vertices[v])).collect();
                for &v in &succ {
                    stochastic.set(u, v, 1.0 / succ.len() as f64);
                }
            }
        }
        Ok(MarkovMeasure {
            sft: sft.clone(),
            block,
            vertices,
            lookup,
            stochastic,
            stationary,
        })
    }

    /// Measure of the cylinder of sequences starting with `w`.
    pub fn cylinder_mass(&self, w: &[u32]) -> f64 {
        let m = self.block;
        if w.is_empty() {
            return 1.0;
        }
        if w.len() <= m {
            return self
                .vertices
                .iter()
                .zip(&self.stationary)
                .filter(|(v, _)| v.symbols().starts_with(w))
                .map(|(_, p)| p)
                .sum();
        }
        let Some(mut cur) = self.vertex(&w[..m]) else {
            return 0.0;
        };
        let mut mass = self.stationary[cur];
        for i in 1..=w.len() - m {
            let Some(next) = self.vertex(&w[i..i + m]) else {
                return 0.0;
            };
            mass *= self.stochastic.get(cur, next);
            cur = next;
        }
        mass
    }

    /// Checks row sums, normalization, support and stationarity.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        for a in 0..n {
            let row: f64 = (0..n).map(|b| self.stochastic.get(a, b)).sum();
            if (row - 1.0).abs() > 1e-12 {
                return Err(Error::Numerical(format!("row {a} sums to {row}")));
            }
            for b in 0..n {
                let p = self.stochastic.get(a, b);
                let (u, v) = (self.vertices[a].symbols(), self.vertices[b].symbols());
                let edge = u[1..] == v[..self.block - 1] && self.sft.allows(u[self.block - 1], v[self.block - 1]);
                if p != 0.0 && !edge {
                    return Err(Error::Numerical(format!("mass on forbidden edge {a}->{b}")));
                }
            }
        }
        let total: f64 = self.stationary.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Numerical(format!("stationary vector sums to {total}")));
        }
        let image = self.stochastic.vec_mul(&self.stationary);
        let residual = image
            .iter()
            .zip(&self.stationary)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        if residual > 1e-10 {
            return Err(Error::Numerical(format!("stationarity residual {residual:e}")));
        }
        Ok(())
    }
}

/// Metric entropy of a stationary Markov chain, `0 log 0 = 0`.
pub fn measure_entropy(m: &MarkovMeasure) -> f64 {
    let n = m.vertices.len();
    let mut h = 0.0;
    for a in 0..n {
        let pa = m.stationary[a];
        if pa == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for b in 0..n {
            let p = m.stochastic.get(a, b);
            if p > 0.0 {
                row -= p * p.ln();
            }
        }
        h += pa * row;
    }
    h.max(0.0)
}

/// `int phi dm`, summed over the cylinders of `phi`'s table.
pub fn measure_integral(m: &MarkovMeasure, phi: &Potential) -> Result<f64> {
    if m.sft() != phi.sft() {
        return Err(Error::SftMismatch);
    }
    Ok(phi
        .words()
        .iter()
        .zip(phi.values())
        .map(|(w, v)| v * m.cylinder_mass(w.symbols()))
        .sum())
}

pub(crate) fn check_sft(sft: &Sft, phi: &Potential) -> Result<()> {
    if sft != phi.sft() {
        Err(Error::SftMismatch)
    } else {
        Ok(())
    }
}

/// Topological pressure `P(t * phi)` in nats.
pub fn pressure(sft: &Sft, phi: &Potential, t: f64) -> Result<f64> {
    check_sft(sft, phi)?;
    Transfer::new(phi)?.pressure_of(phi.values(), t)
}

/// The unique equilibrium state of `t * phi`.
pub fn equilibrium_measure(sft: &Sft, phi: &Potential, t: f64) -> Result<MarkovMeasure> {
    check_sft(sft, phi)?;
    let tr = Transfer::new(phi)?;
    tr.check(phi)?;
    Ok(tr.equilibrium_of(phi.values(), t)?.1)
}

/// Pressure and equilibrium state together.
pub fn equilibrium(sft: &Sft, phi: &Potential, t: f64) -> Result<(f64, MarkovMeasure)> {
    check_sft(sft, phi)?;
    Transfer::new(phi)?.equilibrium_of(phi.values(), t)
}

/// Derivative of `c -> P(t * phi + c * 1_[w])` at `c = 0` for every table
/// word `w`, i.e. the equilibrium mass of each cylinder. Aligned with
/// `phi.words()`.
pub fn pressure_gradient(sft: &Sft, phi: &Potential, t: f64) -> Result<Vec<f64>> {
    check_sft(sft, phi)?;
    let tr = Transfer::new(phi)?;
    let (_, m) = tr.equilibrium_of(phi.values(), t)?;
    Ok(tr.cylinder_masses(&m))
}

/// Samples of `t -> P(t * phi)`.
#[derive(Debug, Clone)]
pub struct PressureCurve {
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub phi: Potential,
}

impl PressureCurve {
    /// Largest violation of convexity, as a negative second divided
    /// difference scaled by the local spacing (0 when convex).
    pub fn convexity_defect(&self) -> f64 {
        let (t, v) = (&self.t_grid, &self.values);
        let mut worst: f64 = 0.0;
        for i in 1..t.len().saturating_sub(1) {
            let left = (v[i] - v[i - 1]) / (t[i] - t[i - 1]);
            let right = (v[i + 1] - v[i]) / (t[i + 1] - t[i]);
            let d2 = (right - left) * (t[i + 1] - t[i - 1]) / 2.0;
            worst = worst.min(d2);
        }
        (-worst).max(0.0)
    }

    /// Largest `|P(t_i) - P(t_j)| - |t_i - t_j| * sup|phi|` over all pairs.
    pub fn lipschitz_excess(&self) -> f64 {
        let l = self.phi.sup_norm();
        let mut worst = f64::NEG_INFINITY;
        for i in 0..self.t_grid.len() {
            for j in i + 1..self.t_grid.len() {
                let e = (self.values[i] - self.values[j]).abs()
                    - (self.t_grid[i] - self.t_grid[j]).abs() * l;
                worst = worst.max(e);
            }
        }
        worst
    }

    pub fn to_csv(&self) -> String {
        crate::io::csv_table(
            &["t", "pressure"],
            self.t_grid.iter().zip(&self.values).map(|(t, p)| vec![*t, *p]),
        )
    }
}

/// Pressure on a sorted grid. Grid points are evaluated independently
/// (in parallel), so the result does not depend on the thread count.
pub fn pressure_curve(sft: &Sft, phi: &Potential, t_grid: &[f64]) -> Result<PressureCurve> {
    check_sft(sft, phi)?;
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidGrid("t grid must be strictly increasing".into()));
    }
    let tr = Transfer::new(phi)?;
    let values = t_grid
        .par_iter()
        .map(|&t| tr.pressure_of(phi.values(), t))
        .collect::<Result<Vec<_>>>()?;
    let curve = PressureCurve {
        t_grid: t_grid.to_vec(),
        values,
        phi: phi.clone(),
    };
    if curve.convexity_defect() > 1e-9 {
        return Err(Error::Numerical(format!(
            "pressure curve not convex (defect {:e})",
            curve.convexity_defect()
        )));
    }
    if curve.lipschitz_excess() > 1e-9 {
        return Err(Error::Numerical("pressure curve violates the Lipschitz bound".into()));
    }
    Ok(curve)
}
