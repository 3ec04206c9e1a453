//! Locally constant potentials and periodic orbits.
//!
//! A depth-`k` potential assigns a value (nats per symbol) to every
//! admissible `k`-word; it is evaluated on a sequence through its first `k`
//! symbols.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sft::{Sft, Word};

const MAX_CODE_TABLE: usize = 1 << 24;

/// A primitive cyclic word, standing for the periodic point it generates
/// and for the invariant probability measure equidistributed on its orbit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodicOrbit {
    word: Word,
}

impl PeriodicOrbit {
    pub fn new(word: Word) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::InvalidWord(String::new()));
        }
        if word.primitive_period() != word.len() {
            return Err(Error::OrbitNotPrimitive(word.to_string()));
        }
        Ok(PeriodicOrbit { word })
    }

    pub fn parse(s: &str) -> Result<Self> {
        PeriodicOrbit::new(Word::parse(s)?)
    }

    /// Like [`PeriodicOrbit::parse`], also checking cyclic admissibility.
    pub fn parse_on(sft: &Sft, s: &str) -> Result<Self> {
        let o = PeriodicOrbit::parse(s)?;
        o.check_on(sft)?;
        Ok(o)
    }

    pub fn check_on(&self, sft: &Sft) -> Result<()> {
        if sft.is_cyclically_admissible(&self.word) {
            Ok(())
        } else {
            Err(Error::OrbitNotAdmissible(self.word.to_string()))
        }
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn period(&self) -> usize {
        self.word.len()
    }

    /// Symbol `i` of the periodic point starting at rotation `r`.
    #[inline]
    pub fn symbol(&self, r: usize, i: usize) -> u32 {
        let s = self.word.symbols();
        s[(r + i) % s.len()]
    }

    /// True iff both words generate the same orbit.
    pub fn same_orbit(&self, other: &PeriodicOrbit) -> bool {
        self.word.canonical_rotation() == other.word.canonical_rotation()
    }

    /// Length of the longest common prefix of `w` with some point of the orbit.
    pub fn longest_match(&self, w: &[u32]) -> usize {
        (0..self.period())
            .map(|r| {
                w.iter()
                    .enumerate()
                    .take_while(|&(i, &s)| self.symbol(r, i) == s)
                    .count()
            })
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for PeriodicOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.word.fmt(f)
    }
}

/// Depth-`k` locally constant potential on a subshift of finite type.
#[derive(Debug, Clone)]
pub struct Potential {
    sft: Sft,
    depth: usize,
    words: Vec<Word>,
    values: Vec<f64>,
    lookup: Vec<u32>,
}

/// On-disk form: `{"depth": k, "table": {"word": value}}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PotentialDocument {
    pub depth: usize,
    pub table: BTreeMap<String, f64>,
}

fn word_code(alphabet: usize, w: &[u32]) -> usize {
    w.iter().fold(0usize, |acc, &s| acc * alphabet + s as usize)
}

impl Potential {
    /// Tabulates `f` on every admissible `depth`-word.
    pub fn from_fn(sft: &Sft, depth: usize, mut f: impl FnMut(&[u32]) -> f64) -> Result<Self> {
        if depth == 0 {
            return Err(Error::ZeroDepth);
        }
        let a = sft.alphabet_size();
        let table_size = (a as u128).checked_pow(depth as u32).unwrap_or(u128::MAX);
        if table_size > MAX_CODE_TABLE as u128 {
            return Err(Error::TooLarge(format!(
                "a depth-{depth} table over {a} symbols"
            )));
        }
        let words = sft.words(depth);
        let mut lookup = vec![u32::MAX; table_size as usize];
        let mut values = Vec::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            lookup[word_code(a, w.symbols())] = i as u32;
            let v = f(w.symbols());
            if !v.is_finite() {
                return Err(Error::InvalidTable(format!("value for {w} is not finite")));
            }
            values.push(v);
        }
        Ok(Potential {
            sft: sft.clone(),
            depth,
            words,
            values,
            lookup,
        })
    }

    /// Builds a potential from an explicit table, which must list every
    /// admissible `depth`-word exactly once.
    pub fn from_table(sft: &Sft, depth: usize, table: &[(Word, f64)]) -> Result<Self> {
        let mut p = Potential::from_fn(sft, depth, |_| 0.0)?;
        let mut seen = vec![false; p.values.len()];
        for (w, v) in table {
            if w.len() != depth {
                return Err(Error::InvalidTable(format!(
                    "word {w} has length {} but depth is {depth}",
                    w.len()
                )));
            }
            let idx = p
                .index_of(w.symbols())
                .ok_or_else(|| Error::InvalidTable(format!("word {w} is not admissible")))?;
            if seen[idx] {
                return Err(Error::InvalidTable(format!("word {w} listed twice")));
            }
            if !v.is_finite() {
                return Err(Error::InvalidTable(format!("value for {w} is not finite")));
            }
            seen[idx] = true;
            p.values[idx] = *v;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidTable(format!("missing word {}", p.words[i])));
        }
        Ok(p)
    }

    pub fn from_document(sft: &Sft, doc: &PotentialDocument) -> Result<Self> {
        let table = doc
            .table
            .iter()
            .map(|(k, v)| Ok((Word::parse(k)?, *v)))
            .collect::<Result<Vec<_>>>()?;
        Potential::from_table(sft, doc.depth, &table)
    }

    pub fn to_document(&self) -> PotentialDocument {
        PotentialDocument {
            depth: self.depth,
            table: self
                .words
                .iter()
                .zip(&self.values)
                .map(|(w, v)| (w.to_string(), *v))
                .collect(),
        }
    }

    pub fn constant(sft: &Sft, c: f64) -> Self {
        Potential::from_fn(sft, 1, |_| c).expect("depth-1 table")
    }

    pub fn zero(sft: &Sft) -> Self {
        Potential::constant(sft, 0.0)
    }

    /// `x -> x_0`, reading the first symbol as a number.
    pub fn first_symbol(sft: &Sft) -> Self {
        Potential::from_fn(sft, 1, |w| w[0] as f64).expect("depth-1 table")
    }

    /// `-1` on sequences starting with `pattern`, `0` elsewhere.
    pub fn negative_indicator(sft: &Sft, pattern: &[u32]) -> Result<Self> {
        Potential::from_fn(sft, pattern.len(), |w| if w == pattern { -1.0 } else { 0.0 })
    }

    /// Same layout, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::InvalidTable(format!(
                "expected {} values, got {}",
                self.values.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidTable("non-finite value".into()));
        }
        Ok(Potential {
            values,
            ..self.clone()
        })
    }

    pub fn sft(&self) -> &Sft {
        &self.sft
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index_of(&self, w: &[u32]) -> Option<usize> {
        if w.len() != self.depth || w.iter().any(|&s| s as usize >= self.sft.alphabet_size()) {
            return None;
        }
        match self.lookup[word_code(self.sft.alphabet_size(), w)] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }

    /// Value on a sequence given by (at least) its first `depth` symbols.
    pub fn eval(&self, x: &[u32]) -> Option<f64> {
        self.index_of(x.get(..self.depth)?).map(|i| self.values[i])
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// The same function written as a depth-`depth` table.
    pub fn lift(&self, depth: usize) -> Result<Potential> {
        if depth < self.depth {
            return Err(Error::InvalidInput(format!(
                "cannot lift depth {} to {depth}",
                self.depth
            )));
        }
        if depth == self.depth {
            return Ok(self.clone());
        }
        Potential::from_fn(&self.sft, depth, |w| {
            self.values[self.index_of(&w[..self.depth]).expect("prefix admissible")]
        })
    }

    /// `self + c * other`, at the larger of the two depths.
    pub fn add_scaled(&self, other: &Potential, c: f64) -> Result<Potential> {
        if self.sft != other.sft {
            return Err(Error::SftMismatch);
        }
        let depth = self.depth.max(other.depth);
        let (a, b) = (self.lift(depth)?, other.lift(depth)?);
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x + c * y).collect();
        a.with_values(values)
    }

    pub fn scaled(&self, c: f64) -> Potential {
        Potential {
            values: self.values.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    pub fn plus_constant(&self, c: f64) -> Potential {
        Potential {
            values: self.values.iter().map(|v| v + c).collect(),
            ..self.clone()
        }
    }

    /// Sum of the potential over one period of the cyclic extension of `w`.
    /// The caller guarantees cyclic admissibility.
    pub fn cyclic_sum(&self, w: &[u32]) -> f64 {
        let n = w.len();
        let mut window = vec![0u32; self.depth];
        let mut total = 0.0;
        for i in 0..n {
            for (j, slot) in window.iter_mut().enumerate() {
                *slot = w[(i + j) % n];
            }
            total += self.values[self.index_of(&window).expect("admissible window")];
        }
        total
    }

    /// Birkhoff average over one full period of the orbit.
    pub fn birkhoff_average(&self, orbit: &PeriodicOrbit) -> Result<f64> {
        orbit.check_on(&self.sft)?;
        Ok(self.cyclic_sum(orbit.word().symbols()) / orbit.period() as f64)
    }
}

/// Birkhoff average of `p` along the periodic orbit.
pub fn birkhoff_average(p: &Potential, orbit: &PeriodicOrbit) -> Result<f64> {
    p.birkhoff_average(orbit)
}

/// Depth-`k` truncation of `y -> -d(y, orbit)` with `d(x, y) = 2^-(first
/// disagreement)`; a word matching an orbit point on all `k` symbols gets
/// `-2^-k`. Values lie in `[-1, -2^-k]`.
pub fn orbit_distance_potential(sft: &Sft, orbit: &PeriodicOrbit, depth: usize) -> Result<Potential> {
    orbit.check_on(sft)?;
    Potential::from_fn(sft, depth, |w| {
        let j = orbit.longest_match(w).min(depth);
        -(0.5f64).powi(j as i32)
    })
}

fn truncated_distance(orbit: &PeriodicOrbit, w: &[u32]) -> f64 {
    let j = orbit.longest_match(w);
    if j >= w.len() {
        0.0
    } else {
        (0.5f64).powi(j as i32)
    }
}

/// Depth-`k` truncation of `g = (d(z,B) - d(z,A)) / (d(z,A) + d(z,B))`.
///
/// A word that matches a point of `A` on all `k` symbols is at distance
/// zero from `A`, so `g = 1` exactly on prefixes of `A` and `-1` on prefixes
/// of `B`.
pub fn normalized_separation_potential(
    sft: &Sft,
    a: &PeriodicOrbit,
    b: &PeriodicOrbit,
    depth: usize,
) -> Result<Potential> {
    a.check_on(sft)?;
    b.check_on(sft)?;
    if a.same_orbit(b) {
        return Err(Error::OrbitsIntersect(a.to_string(), b.to_string()));
    }
    let mut clash = false;
    let p = Potential::from_fn(sft, depth, |w| {
        let da = truncated_distance(a, w);
        let db = truncated_distance(b, w);
        if da + db == 0.0 {
            clash = true;
            return 0.0;
        }
        (db - da) / (da + db)
    })?;
    if clash {
        return Err(Error::InsufficientDepth {
            depth,
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    Ok(p)
}

/// Pointwise `(1 - t) p + t q` at the larger of the two depths.
pub fn affine_combine(p: &Potential, q: &Potential, t: f64) -> Result<Potential> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidInput(format!("t = {t} is outside [0, 1]")));
    }
    if p.sft() != q.sft() {
        return Err(Error::SftMismatch);
    }
    let depth = p.depth().max(q.depth());
    let (a, b) = (p.lift(depth)?, q.lift(depth)?);
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (1.0 - t) * x + t * y)
        .collect();
    a.with_values(values)
}

/// `p - q` at the larger of the two depths.
pub fn difference(p: &Potential, q: &Potential) -> Result<Potential> {
    p.add_scaled(q, -1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orbit(s: &str) -> PeriodicOrbit {
        PeriodicOrbit::parse(s).unwrap()
    }

    #[test]
    fn birkhoff_examples() {
        let full = Sft::full_shift(2);
        let x0 = Potential::first_symbol(&full);
        assert_eq!(birkhoff_average(&x0, &orbit("1")).unwrap(), 1.0);
        assert_eq!(birkhoff_average(&x0, &orbit("01")).unwrap(), 0.5);
        let ind = Potential::negative_indicator(&full, &[1, 1]).unwrap();
        assert_eq!(birkhoff_average(&ind, &orbit("1")).unwrap(), -1.0);
        let gm = Sft::golden_mean();
        let z = Potential::zero(&gm);
        assert!(matches!(
            birkhoff_average(&z, &orbit("1")),
            Err(Error::OrbitNotAdmissible(_))
        ));
    }

    #[test]
    fn orbit_must_be_primitive() {
        assert!(matches!(
            PeriodicOrbit::parse("0101"),
            Err(Error::OrbitNotPrimitive(_))
        ));
    }

    #[test]
    fn distance_potential_examples() {
        let full = Sft::full_shift(2);
        let p = orbit_distance_potential(&full, &orbit("0"), 1).unwrap();
        assert_eq!(p.eval(&[0]), Some(-0.5));
        assert_eq!(p.eval(&[1]), Some(-1.0));
        let p3 = orbit_distance_potential(&full, &orbit("0"), 3).unwrap();
        assert_eq!(p3.eval(&[0, 0, 0]), Some(-0.125));
        for w in p3.words() {
            if w.symbols()[0] == 1 {
                assert_eq!(p3.eval(w.symbols()), Some(-1.0));
            }
            let v = p3.eval(w.symbols()).unwrap();
            assert!((-1.0..=-0.125).contains(&v));
        }
    }

    #[test]
    fn separation_potential_examples() {
        let full = Sft::full_shift(2);
        let g = normalized_separation_potential(&full, &orbit("0"), &orbit("1"), 1).unwrap();
        assert_eq!(g.values(), &[1.0, -1.0]);
        let g2 = normalized_separation_potential(&full, &orbit("0"), &orbit("1"), 2).unwrap();
        assert_eq!(g2.values(), &[1.0, 1.0 / 3.0, -1.0 / 3.0, -1.0]);
        let swapped = normalized_separation_potential(&full, &orbit("1"), &orbit("0"), 3).unwrap();
        let g3 = normalized_separation_potential(&full, &orbit("0"), &orbit("1"), 3).unwrap();
        for (a, b) in g3.values().iter().zip(swapped.values()) {
            assert_eq!(*a, -*b);
        }
        assert!(g3.values().iter().all(|v| (-1.0..=1.0).contains(v)));
        let three = Sft::full_shift(3);
        let g = normalized_separation_potential(&three, &orbit("0"), &orbit("1"), 1).unwrap();
        assert_eq!(g.eval(&[2]), Some(0.0));
    }

    #[test]
    fn separation_errors() {
        let full = Sft::full_shift(2);
        assert!(matches!(
            normalized_separation_potential(&full, &orbit("01"), &orbit("10"), 2),
            Err(Error::OrbitsIntersect(..))
        ));
        assert!(matches!(
            normalized_separation_potential(&full, &orbit("01"), &orbit("0"), 1),
            Err(Error::InsufficientDepth { .. })
        ));
    }

    #[test]
    fn affine_examples() {
        let full = Sft::full_shift(2);
        let p = Potential::from_fn(&full, 1, |w| if w[0] == 0 { 0.0 } else { 2.0 }).unwrap();
        let q = Potential::from_fn(&full, 1, |w| if w[0] == 0 { 2.0 } else { 0.0 }).unwrap();
        assert_eq!(affine_combine(&p, &q, 0.0).unwrap().values(), p.values());
        assert_eq!(affine_combine(&p, &q, 1.0).unwrap().values(), q.values());
        assert_eq!(affine_combine(&p, &q, 0.5).unwrap().values(), &[1.0, 1.0]);
        let other = Potential::zero(&Sft::golden_mean());
        assert_eq!(affine_combine(&p, &other, 0.5).unwrap_err(), Error::SftMismatch);
    }

    #[test]
    fn document_round_trip_and_validation() {
        let full = Sft::full_shift(2);
        let p = orbit_distance_potential(&full, &orbit("01"), 3).unwrap();
        let doc = p.to_document();
        let back = Potential::from_document(&full, &doc).unwrap();
        assert_eq!(back.values(), p.values());
        let mut missing = doc.clone();
        missing.table.remove("000");
        assert!(matches!(
            Potential::from_document(&full, &missing),
            Err(Error::InvalidTable(_))
        ));
        let gm = Sft::golden_mean();
        let bad = PotentialDocument {
            depth: 2,
            table: [("00", 0.0), ("01", 0.0), ("10", 0.0), ("11", 0.0)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        };
        assert!(Potential::from_document(&gm, &bad).is_err());
    }
}
