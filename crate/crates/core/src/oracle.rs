//! Brute-force cross-checks by enumerating periodic orbits and words.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potential::{PeriodicOrbit, Potential};
use crate::sft::{Sft, Word};
use crate::spectra::{rotation_set, SpectrumGraph};

pub const MAX_CATALOG_PERIOD: usize = 16;
const MAX_WORDS: f64 = (1u64 << 24) as f64;

/// Every periodic orbit up to a period, one canonical word per orbit.
#[derive(Debug, Clone)]
pub struct OrbitCatalog {
    pub max_period: usize,
    /// `orbits[p - 1]` holds the orbits of least period `p`, sorted.
    pub orbits: Vec<Vec<PeriodicOrbit>>,
}

fn cyclic_words(sft: &Sft, n: usize) -> Vec<Vec<u32>> {
    let starts: Vec<u32> = (0..sft.alphabet_size() as u32).collect();
    starts
        .par_iter()
        .map(|&a| {
            let mut out = Vec::new();
            let mut stack = vec![a];
            fn rec(sft: &Sft, n: usize, stack: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
                let last = *stack.last().unwrap();
                if stack.len() == n {
                    if sft.allows(last, stack[0]) {
                        out.push(stack.clone());
                    }
                    return;
                }
                for b in sft.successors(last) {
                    // a canonical word starts with its least symbol
                    if b < stack[0] {
                        continue;
                    }
                    stack.push(b);
                    rec(sft, n, stack, out);
                    stack.pop();
                }
            }
            rec(sft, n, &mut stack, &mut out);
            out
        })
        .flatten()
        .collect()
}

/// Complete list of periodic orbits with period at most `max_period`.
pub fn enumerate_orbits(sft: &Sft, max_period: usize) -> Result<OrbitCatalog> {
    if max_period > MAX_CATALOG_PERIOD {
        return Err(Error::PeriodTooLarge(max_period));
    }
    let mut orbits = Vec::with_capacity(max_period);
    for n in 1..=max_period {
        let mut level: Vec<PeriodicOrbit> = cyclic_words(sft, n)
            .into_par_iter()
            .filter_map(|w| {
                let w = Word::new(w);
                (w.primitive_period() == n && w.canonical_rotation() == w)
                    .then(|| PeriodicOrbit::new(w).expect("primitive"))
            })
            .collect();
        level.sort_by(|a, b| a.word().cmp(b.word()));
        orbits.push(level);
    }
    Ok(OrbitCatalog { max_period, orbits })
}

impl OrbitCatalog {
    pub fn of_period(&self, p: usize) -> &[PeriodicOrbit] {
        &self.orbits[p - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = &PeriodicOrbit> {
        self.orbits.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.orbits.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of points `x` with `f^n x = x`.
    pub fn fixed_points(&self, n: usize) -> usize {
        (1..=n)
            .filter(|d| n.is_multiple_of(*d))
            .map(|d| d * self.orbits[d - 1].len())
            .sum()
    }

    /// Smallest and largest Birkhoff averages with the orbits attaining them
    /// (first in catalog order on ties).
    pub fn extreme_averages(&self, phi: &Potential) -> Result<((f64, PeriodicOrbit), (f64, PeriodicOrbit))> {
        let mut lo: Option<(f64, PeriodicOrbit)> = None;
        let mut hi: Option<(f64, PeriodicOrbit)> = None;
        for o in self.iter() {
            let a = phi.birkhoff_average(o)?;
            if lo.as_ref().is_none_or(|(v, _)| a < *v) {
                lo = Some((a, o.clone()));
            }
            if hi.as_ref().is_none_or(|(v, _)| a > *v) {
                hi = Some((a, o.clone()));
            }
        }
        match (lo, hi) {
            (Some(l), Some(h)) => Ok((l, h)),
            _ => Err(Error::InvalidInput("empty orbit catalog".into())),
        }
    }

    /// `(1/n) log sum_{f^n x = x} exp(t S_n phi(x))`.
    pub fn periodic_pressure(&self, phi: &Potential, t: f64, n: usize) -> Result<f64> {
        if n == 0 || n > self.max_period {
            return Err(Error::PeriodTooLarge(n));
        }
        // each orbit of period d | n contributes d points with S_n = (n/d) S_d
        let mut terms = Vec::new();
        for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
            for o in self.of_period(d) {
                let sum = phi.cyclic_sum(o.word().symbols()) * (n / d) as f64;
                terms.push(((d as f64).ln(), t * sum));
            }
        }
        if terms.is_empty() {
            return Ok(f64::NEG_INFINITY);
        }
        let top = terms.iter().map(|(l, v)| l + v).fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = terms.iter().map(|(l, v)| (l + v - top).exp()).sum();
        Ok((top + total.ln()) / n as f64)
    }

    /// `period,orbit` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("period,orbit\n");
        for o in self.iter() {
            out.push_str(&format!("{},{}\n", o.period(), o));
        }
        out
    }
}

/// Periodic-point approximation of the pressure of `t phi` at level `n`.
pub fn periodic_pressure(sft: &Sft, phi: &Potential, t: f64, n: usize) -> Result<f64> {
    enumerate_orbits(sft, n)?.periodic_pressure(phi, t, n)
}

/// `(1/n) log #{n-words with Birkhoff average in the bin}` over `bins`
/// equal bins of the rotation interval.
///
/// Each occupied bin gives one point, placed at the average attained by the
/// most words in that bin. The Birkhoff average of a word is taken over its
/// `n - k + 1` complete windows.
pub fn word_count_spectrum(sft: &Sft, phi: &Potential, n: usize, bins: usize) -> Result<SpectrumGraph> {
    if phi.sft() != sft {
        return Err(Error::SftMismatch);
    }
    let k = phi.depth();
    if n < k || bins == 0 {
        return Err(Error::InvalidInput(format!("need n >= depth and bins >= 1 (n = {n}, bins = {bins})")));
    }
    if (sft.alphabet_size() as f64).powi(n as i32) > MAX_WORDS {
        return Err(Error::TooLarge(format!(
            "{}^{n} words exceed the enumeration limit",
            sft.alphabet_size()
        )));
    }
    let rot = rotation_set(sft, phi)?;
    let windows = (n - k + 1) as f64;
    let width = rot.alpha_max - rot.alpha_min;
    let bin_of = |a: f64| -> usize {
        if rot.is_degenerate() {
            0
        } else {
            (((a - rot.alpha_min) / width * bins as f64).floor().max(0.0) as usize).min(bins - 1)
        }
    };

    // per bin: rounded average -> (count, first exact value seen)
    type Hist = Vec<BTreeMap<i64, (u64, f64)>>;
    let starts: Vec<u32> = (0..sft.alphabet_size() as u32).collect();
    let partial: Vec<Hist> = starts
        .par_iter()
        .map(|&a| {
            let mut hist: Hist = vec![BTreeMap::new(); bins];
            let mut stack = vec![a];
            let mut sums = vec![0.0f64];
            fn rec(
                sft: &Sft,
                phi: &Potential,
                n: usize,
                stack: &mut Vec<u32>,
                sums: &mut Vec<f64>,
                visit: &mut dyn FnMut(f64),
            ) {
                let k = phi.depth();
                if stack.len() == n {
                    visit(*sums.last().unwrap());
                    return;
                }
                let last = *stack.last().unwrap();
                for b in sft.successors(last) {
                    stack.push(b);
                    let mut s = *sums.last().unwrap();
                    if stack.len() >= k {
                        let w = &stack[stack.len() - k..];
                        s += phi.values()[phi.index_of(w).expect("admissible window")];
                    }
                    sums.push(s);
                    rec(sft, phi, n, stack, sums, visit);
                    sums.pop();
                    stack.pop();
                }
            }
            if k == 1 {
                sums[0] = phi.values()[phi.index_of(&[a]).expect("symbol")];
            }
            let mut visit = |total: f64| {
                let avg = total / windows;
                let slot = hist[bin_of(avg)].entry((avg * 1e9).round() as i64).or_insert((0, avg));
                slot.0 += 1;
            };
            rec(sft, phi, n, &mut stack, &mut sums, &mut visit);
            hist
        })
        .collect();

    let mut merged: Hist = vec![BTreeMap::new(); bins];
    for hist in partial {
        for (b, map) in hist.into_iter().enumerate() {
            for (key, (c, v)) in map {
                merged[b].entry(key).and_modify(|e| e.0 += c).or_insert((c, v));
            }
        }
    }
    let mut points = Vec::new();
    for map in merged {
        let total: u64 = map.values().map(|e| e.0).sum();
        if total == 0 {
            continue;
        }
        // BTreeMap order makes the lowest average win ties
        let (_, (_, alpha)) = map
            .iter()
            .fold(None::<(u64, (u64, f64))>, |best, (_, &(c, v))| match best {
                Some((bc, _)) if bc >= c => best,
                _ => Some((c, (c, v))),
            })
            .expect("nonempty bin");
        points.push((alpha, (total as f64).ln() / n as f64));
    }
    SpectrumGraph::from_samples(points)
}

/// `(|periodic_pressure - pressure|)` for each `n`.
pub fn periodic_pressure_errors(sft: &Sft, phi: &Potential, t: f64, ns: &[usize]) -> Result<Vec<f64>> {
    let exact = crate::thermo::pressure(sft, phi, t)?;
    let max_n = ns.iter().copied().max().unwrap_or(1);
    let catalog = enumerate_orbits(sft, max_n)?;
    ns.iter()
        .map(|&n| Ok((catalog.periodic_pressure(phi, t, n)? - exact).abs()))
        .collect()
}
