//! Convex analysis on uniform one-dimensional grids.
//!
//! Conjugates are computed exactly for a piecewise-quadratic interpolant of
//! the samples: each cell carries the chord plus a curvature term equal to
//! the smaller of the two neighbouring second differences. The limiter keeps
//! kinks piecewise linear (so `|t|` transforms exactly), while smooth data
//! gets second-order accurate suprema. Because the result is a supremum of
//! affine functions of the slope it is convex by construction.

use crate::error::{Error, Result};

const CONVEX_TOL: f64 = 1e-9;
const FLAT_TOL: f64 = 1e-12;

/// Samples of a scalar function on a uniform grid (or a single point).
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    x: Vec<f64>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(x: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if x.len() != values.len() {
            return Err(Error::InvalidGrid(format!(
                "{} grid points but {} values",
                x.len(),
                values.len()
            )));
        }
        if x.len() == 2 || x.is_empty() {
            return Err(Error::InvalidGrid("need at least 3 points (or exactly 1)".into()));
        }
        if x.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite entry".into()));
        }
        if x.len() > 1 {
            let n = x.len();
            let h = (x[n - 1] - x[0]) / (n - 1) as f64;
            if !(h > 0.0) {
                return Err(Error::InvalidGrid("grid must be strictly increasing".into()));
            }
            let scale = x[0].abs().max(x[n - 1].abs()).max(h);
            for i in 1..n {
                let d = x[i] - x[i - 1];
                if !(d > 0.0) || (d - h).abs() > 1e-12 * scale {
                    return Err(Error::InvalidGrid(format!("spacing at index {i} is not uniform")));
                }
            }
        }
        Ok(GridFunction { x, values })
    }

    /// `n` samples of `f` on `[a, b]`.
    pub fn uniform(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let x = linspace(a, b, n);
        let values = x.iter().map(|&t| f(t)).collect();
        GridFunction::new(x, values)
    }

    /// A function known at a single point (degenerate interval).
    pub fn point(x: f64, value: f64) -> Self {
        GridFunction {
            x: vec![x],
            values: vec![value],
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn is_point(&self) -> bool {
        self.x.len() == 1
    }

    pub fn spacing(&self) -> f64 {
        if self.is_point() {
            0.0
        } else {
            (self.x[self.len() - 1] - self.x[0]) / (self.len() - 1) as f64
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.len() - 1])
    }

    /// Slopes of the chords between consecutive samples.
    pub fn slopes(&self) -> Vec<f64> {
        let h = self.spacing();
        self.values.windows(2).map(|w| (w[1] - w[0]) / h).collect()
    }

    /// `f[i-1] - 2 f[i] + f[i+1]` for interior indices, aligned so entry
    /// `j` belongs to grid index `j + 1`.
    pub fn second_differences(&self) -> Vec<f64> {
        self.values
            .windows(3)
            .map(|w| w[0] - 2.0 * w[1] + w[2])
            .collect()
    }

    pub fn check_convex(&self) -> Result<()> {
        for (j, d) in self.second_differences().into_iter().enumerate() {
            if d < -CONVEX_TOL {
                return Err(Error::NotConvex {
                    index: j + 1,
                    second_difference: d,
                });
            }
        }
        Ok(())
    }

    pub fn check_concave(&self) -> Result<()> {
        for (j, d) in self.second_differences().into_iter().enumerate() {
            if d > CONVEX_TOL {
                return Err(Error::NotConcave {
                    index: j + 1,
                    second_difference: d,
                });
            }
        }
        Ok(())
    }

    pub fn negated(&self) -> GridFunction {
        GridFunction {
            x: self.x.clone(),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    pub fn map_values(&self, f: impl Fn(f64, f64) -> f64) -> GridFunction {
        GridFunction {
            x: self.x.clone(),
            values: self.x.iter().zip(&self.values).map(|(&x, &v)| f(x, v)).collect(),
        }
    }

    /// Piecewise linear interpolation, clamped to the domain.
    pub fn eval_linear(&self, t: f64) -> f64 {
        if self.is_point() {
            return self.values[0];
        }
        let h = self.spacing();
        let n = self.len();
        let u = ((t - self.x[0]) / h).clamp(0.0, (n - 1) as f64);
        let i = (u.floor() as usize).min(n - 2);
        let w = u - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// Four-point Lagrange interpolation (third order), clamped to the domain.
    pub fn eval_cubic(&self, t: f64) -> f64 {
        let n = self.len();
        if n < 4 {
            return self.eval_linear(t);
        }
        let h = self.spacing();
        let u = ((t - self.x[0]) / h).clamp(0.0, (n - 1) as f64);
        let start = (u.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let mut acc = 0.0;
        for j in 0..4 {
            let mut l = 1.0;
            for m in 0..4 {
                if m != j {
                    l *= (u - (start + m) as f64) / (j as f64 - m as f64);
                }
            }
            acc += l * self.values[start + j];
        }
        acc
    }

    fn cell_curvature(&self, i: usize, d2: &[f64]) -> f64 {
        // cell [x_i, x_{i+1}] touches interior nodes i and i+1 (d2 index i-1 and i)
        let h = self.spacing();
        let left = if i >= 1 { d2.get(i - 1).copied() } else { None };
        let right = d2.get(i).copied();
        let c = match (left, right) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => 0.0,
        };
        c.max(0.0) / (h * h)
    }

    /// `sup_t (y t - f(t))` over the interpolant.
    pub fn conjugate_at(&self, y: f64) -> f64 {
        self.conjugate_with(y, &self.second_differences(), &self.slopes())
    }

    fn conjugate_with(&self, y: f64, d2: &[f64], slopes: &[f64]) -> f64 {
        let n = self.len();
        if n == 1 {
            return y * self.x[0] - self.values[0];
        }
        let h = self.spacing();
        // node argmax of y t - f(t); slopes are nondecreasing for convex data
        let guess = slopes.partition_point(|&s| s < y);
        let lo = guess.saturating_sub(3);
        let hi = (guess + 3).min(n - 1);
        let mut best = f64::NEG_INFINITY;
        for j in lo..=hi {
            best = best.max(y * self.x[j] - self.values[j]);
        }
        for i in lo..hi.min(n - 1) {
            let c = self.cell_curvature(i, d2);
            if c <= 0.0 {
                continue;
            }
            let s = slopes[i];
            let u = ((y - s) / c + h / 2.0).clamp(0.0, h);
            let v = y * self.x[i] - self.values[i] + (y - s) * u - 0.5 * c * (u * u - h * u);
            best = best.max(v);
        }
        best
    }

    pub fn to_csv(&self) -> String {
        crate::io::csv_table(
            &["x", "value"],
            self.x.iter().zip(&self.values).map(|(a, b)| vec![*a, *b]),
        )
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (header, rows) = crate::io::parse_csv(text)?;
        if header.len() < 2 {
            return Err(Error::InvalidInput("grid CSV needs two columns".into()));
        }
        let x = rows.iter().map(|r| r[0]).collect();
        let v = rows.iter().map(|r| r[1]).collect();
        GridFunction::new(x, v)
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
                .collect()
        }
    }
}

/// Convex conjugate `F*(a) = sup_t (a t - F(t))`, sampled on the range of
/// chord slopes of `f` with as many points as `f` has. An affine input gives
/// a single-point result.
pub fn legendre(f: &GridFunction) -> Result<GridFunction> {
    f.check_convex()?;
    if f.is_point() {
        // conjugate of a point function is affine with no bounded slope range
        return Err(Error::InvalidGrid("conjugate of a single point is unbounded".into()));
    }
    let slopes = f.slopes();
    let d2 = f.second_differences();
    let (lo, hi) = (slopes[0], slopes[slopes.len() - 1]);
    let scale = lo.abs().max(hi.abs()).max(1.0);
    if hi - lo <= 1e-12 * scale {
        let a = 0.5 * (lo + hi);
        return Ok(GridFunction::point(a, f.conjugate_with(a, &d2, &slopes)));
    }
    let grid = linspace(lo, hi, f.len());
    let values = grid.iter().map(|&a| f.conjugate_with(a, &d2, &slopes)).collect();
    GridFunction::new(grid, values)
}

/// Raw dual spectrum `h(a) = inf_t (F(t) - t a) = -F*(a)` on the slope range.
pub fn dual_spectrum(f: &GridFunction) -> Result<GridFunction> {
    Ok(legendre(f)?.negated())
}

/// Largest change of the chord slope across the outer 10% of the grid on
/// each side: `(left, right)`.
pub fn boundary_slope_variation(f: &GridFunction) -> (f64, f64) {
    let s = f.slopes();
    let m = ((s.len() as f64) * 0.1).ceil().max(2.0) as usize;
    let m = m.min(s.len());
    let left = s[m - 1] - s[0];
    let right = s[s.len() - 1] - s[s.len() - m];
    (left.abs(), right.abs())
}

/// `h = -F*` as a C_ms function on `[D-, D+]`, the extreme chord slopes.
///
/// Fails with `SlopesNotStabilized` when the slopes still move by more than
/// `slope_tol` over the outer tenth of the grid.
pub fn spectrum_from_pressure(f: &GridFunction, slope_tol: f64) -> Result<CmsFunction> {
    f.check_convex()?;
    let (left, right) = boundary_slope_variation(f);
    if left > slope_tol {
        return Err(Error::SlopesNotStabilized {
            side: "left",
            variation: left,
            tol: slope_tol,
        });
    }
    if right > slope_tol {
        return Err(Error::SlopesNotStabilized {
            side: "right",
            variation: right,
            tol: slope_tol,
        });
    }
    let h = dual_spectrum(f)?;
    let top = h.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    validate_cms(&h, top, FLAT_TOL)
}

/// `sup |F** - F|` over the grid with 5% trimmed from each end.
pub fn fenchel_roundtrip_error(f: &GridFunction) -> Result<f64> {
    let g = legendre(f)?;
    let n = f.len();
    let margin = ((n as f64) * 0.05).floor() as usize;
    let mut worst: f64 = 0.0;
    for i in margin..n - margin {
        let back = g.conjugate_at(f.x()[i]);
        worst = worst.max((back - f.values()[i]).abs());
    }
    Ok(worst)
}

/// Range of vertical-axis intercepts `F(t) - v t` of the supporting lines at
/// grid points, with `v` ranging over the one-sided chord slopes.
pub fn supporting_intercepts(f: &GridFunction) -> Result<(f64, f64)> {
    f.check_convex()?;
    if f.is_point() {
        return Ok((f.values()[0], f.values()[0]));
    }
    let s = f.slopes();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..f.len() {
        let t = f.x()[i];
        let mut candidates = Vec::with_capacity(2);
        if i > 0 {
            candidates.push(s[i - 1]);
        }
        if i < s.len() {
            candidates.push(s[i]);
        }
        for v in candidates {
            let b = f.values()[i] - v * t;
            lo = lo.min(b);
            hi = hi.max(b);
        }
    }
    Ok((lo, hi))
}

/// Size of a kink at the grid point nearest `t0`: the jump of the one-sided
/// slopes there, minus the jump expected from the neighbouring curvature.
pub fn kink_at(f: &GridFunction, t0: f64) -> f64 {
    let n = f.len();
    if n < 5 {
        return 0.0;
    }
    let h = f.spacing();
    let j = (((t0 - f.x()[0]) / h).round() as isize).clamp(2, n as isize - 3) as usize;
    let d2 = f.second_differences();
    let at = |i: usize| d2[i - 1];
    ((at(j) - 0.5 * (at(j - 1) + at(j + 1))) / h).abs()
}

/// A concave, nonnegative function with a strictly positive maximum at a
/// unique point.
#[derive(Debug, Clone, PartialEq)]
pub struct CmsFunction {
    pub base: GridFunction,
    pub maximizer_index: usize,
    pub max_value: f64,
}

impl CmsFunction {
    pub fn maximizer(&self) -> f64 {
        self.base.x()[self.maximizer_index]
    }

    pub fn domain(&self) -> (f64, f64) {
        self.base.domain()
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.base.to_csv();
        s.push_str(&format!(
            "# maximizer={},max_value={}\n",
            crate::io::fmt_f64(self.maximizer()),
            crate::io::fmt_f64(self.max_value)
        ));
        s
    }
}

/// Checks the C_ms axioms with maximum `big_h`.
///
/// A flat top of one grid cell (two equal neighbouring samples) is
/// tolerated; anything wider is `NonUniqueMaximizer`.
pub fn validate_cms(h: &GridFunction, big_h: f64, tol: f64) -> Result<CmsFunction> {
    h.check_concave()?;
    let v = h.values();
    for (i, &x) in v.iter().enumerate() {
        if x < -FLAT_TOL {
            return Err(Error::NegativeValues { index: i, value: x });
        }
    }
    let (mut arg, mut top) = (0, f64::NEG_INFINITY);
    for (i, &x) in v.iter().enumerate() {
        if x > top {
            top = x;
            arg = i;
        }
    }
    if !(top > 0.0) {
        return Err(Error::NegativeValues { index: arg, value: top });
    }
    if (top - big_h).abs() > tol {
        return Err(Error::MaxMismatch {
            expected: big_h,
            found: top,
            tol,
        });
    }
    let flat: Vec<usize> = (0..v.len()).filter(|&i| v[i] >= top - FLAT_TOL).collect();
    let (first, last) = (flat[0], flat[flat.len() - 1]);
    if last - first > 1 || flat.len() != last - first + 1 {
        return Err(Error::NonUniqueMaximizer { first, last });
    }
    Ok(CmsFunction {
        base: h.clone(),
        maximizer_index: arg,
        max_value: top,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn logistic(t: f64) -> f64 {
        if t > 0.0 {
            t + (-t).exp().ln_1p()
        } else {
            t.exp().ln_1p()
        }
    }

    fn binary_entropy(a: f64) -> f64 {
        let xlogx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
        -xlogx(a) - xlogx(1.0 - a)
    }

    #[test]
    fn legendre_of_quadratic_is_self_dual() {
        let f = GridFunction::uniform(-3.0, 3.0, 601, |t| t * t / 2.0).unwrap();
        let g = legendre(&f).unwrap();
        let (lo, hi) = g.domain();
        assert!((lo + 2.995).abs() < 1e-9 && (hi - 2.995).abs() < 1e-9);
        for (a, v) in g.x().iter().zip(g.values()) {
            assert!((v - a * a / 2.0).abs() < 1e-12, "{a}: {v}");
        }
    }

    #[test]
    fn legendre_of_abs_vanishes() {
        let f = GridFunction::uniform(-2.0, 2.0, 401, f64::abs).unwrap();
        let g = legendre(&f).unwrap();
        let (lo, hi) = g.domain();
        assert!((lo + 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
        assert!(g.values().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn legendre_of_affine_is_a_point() {
        let f = GridFunction::uniform(-1.0, 4.0, 11, |t| 2.0 + 0.7 * t).unwrap();
        let g = legendre(&f).unwrap();
        assert!(g.is_point());
        assert!((g.x()[0] - 0.7).abs() < 1e-15);
        assert!((g.values()[0] + 2.0).abs() < 1e-14);
    }

    #[test]
    fn not_convex_rejected() {
        let f = GridFunction::uniform(-1.0, 1.0, 21, |t| -t * t).unwrap();
        assert!(matches!(legendre(&f), Err(Error::NotConvex { .. })));
    }

    #[test]
    fn logistic_pressure_dual_is_binary_entropy() {
        let f = GridFunction::uniform(-20.0, 20.0, 4001, logistic).unwrap();
        let h = spectrum_from_pressure(&f, 1e-6).unwrap();
        for (a, v) in h.base.x().iter().zip(h.base.values()) {
            if (0.01..=0.99).contains(a) {
                assert!((v - binary_entropy(*a)).abs() < 1e-6, "{a}: {v}");
            }
        }
        assert!((h.max_value - 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn constant_pressure_gives_point_spectrum() {
        let f = GridFunction::uniform(-5.0, 5.0, 101, |_| 1.3).unwrap();
        let h = spectrum_from_pressure(&f, 1e-9).unwrap();
        assert!(h.base.is_point());
        assert_eq!(h.base.x()[0], 0.0);
        assert!((h.max_value - 1.3).abs() < 1e-15);
    }

    #[test]
    fn tent_dual_is_flat_topped() {
        let f = GridFunction::uniform(-5.0, 5.0, 1001, |t| 2f64.ln() + 0.3 * t.abs()).unwrap();
        let h = dual_spectrum(&f).unwrap();
        h.check_concave().unwrap();
        // brute-force infimum over the grid
        for (a, v) in h.x().iter().zip(h.values()) {
            let brute = f
                .x()
                .iter()
                .zip(f.values())
                .map(|(t, ft)| ft - t * a)
                .fold(f64::INFINITY, f64::min);
            assert!((v - brute).abs() < 1e-12);
            assert!((v - 2f64.ln()).abs() < 1e-12);
        }
        assert!(matches!(
            spectrum_from_pressure(&f, 1e-9),
            Err(Error::NonUniqueMaximizer { .. })
        ));
    }

    #[test]
    fn unstabilized_slopes_rejected() {
        let f = GridFunction::uniform(-2.0, 2.0, 401, logistic).unwrap();
        assert!(matches!(
            spectrum_from_pressure(&f, 1e-3),
            Err(Error::SlopesNotStabilized { .. })
        ));
    }

    #[test]
    fn roundtrip_examples() {
        let h = 0.01;
        let q = GridFunction::uniform(-3.0, 3.0, 601, |t| t * t / 2.0).unwrap();
        assert!(fenchel_roundtrip_error(&q).unwrap() <= h * h / 8.0);
        let aff = GridFunction::uniform(-3.0, 3.0, 61, |t| 1.0 - 2.0 * t).unwrap();
        assert!(fenchel_roundtrip_error(&aff).unwrap() <= 1e-12);
        let lg = GridFunction::uniform(-10.0, 10.0, 2001, logistic).unwrap();
        assert!(fenchel_roundtrip_error(&lg).unwrap() < 1e-4);
    }

    #[test]
    fn intercept_examples() {
        let lg = GridFunction::uniform(-10.0, 10.0, 2001, logistic).unwrap();
        let (lo, hi) = supporting_intercepts(&lg).unwrap();
        assert!(lo >= -1e-12 && hi <= 2f64.ln() + 1e-12, "{lo} {hi}");
        let aff = GridFunction::uniform(-1.0, 1.0, 21, |t| 0.5 + 3.0 * t).unwrap();
        let (lo, hi) = supporting_intercepts(&aff).unwrap();
        assert!((lo - 0.5).abs() < 1e-12 && (hi - 0.5).abs() < 1e-12);
        let c = GridFunction::uniform(-1.0, 1.0, 21, |_| 0.9).unwrap();
        assert_eq!(supporting_intercepts(&c).unwrap(), (0.9, 0.9));
    }

    #[test]
    fn cms_validation() {
        let ln2 = 2f64.ln();
        let h = GridFunction::uniform(0.0, 1.0, 101, binary_entropy).unwrap();
        let c = validate_cms(&h, ln2, 1e-12).unwrap();
        assert_eq!(c.maximizer_index, 50);

        let trap = GridFunction::new(
            linspace(0.0, 1.0, 7),
            vec![0.0, 0.5, 1.0, 1.0, 1.0, 0.5, 0.0],
        )
        .unwrap();
        assert!(matches!(
            validate_cms(&trap, 1.0, 1e-12),
            Err(Error::NonUniqueMaximizer { first: 2, last: 4 })
        ));

        let dent = GridFunction::new(linspace(0.0, 1.0, 5), vec![0.0, 0.6, 0.4, 0.9, 0.0]).unwrap();
        assert!(matches!(validate_cms(&dent, 0.9, 1e-12), Err(Error::NotConcave { .. })));

        assert!(matches!(validate_cms(&h, 1.0, 1e-6), Err(Error::MaxMismatch { .. })));
        let neg = h.map_values(|_, v| v - 0.1);
        assert!(matches!(
            validate_cms(&neg, ln2 - 0.1, 1e-9),
            Err(Error::NegativeValues { .. })
        ));
    }

    #[test]
    fn kink_detection() {
        let smooth = GridFunction::uniform(-5.0, 5.0, 1001, logistic).unwrap();
        assert!(kink_at(&smooth, 0.0) < 1e-6);
        let tent = GridFunction::uniform(-5.0, 5.0, 1001, |t| 0.3 * t.abs()).unwrap();
        assert!((kink_at(&tent, 0.0) - 0.6).abs() < 1e-9);
    }

    #[test]
    fn cubic_interpolation_is_exact_on_cubics() {
        let f = GridFunction::uniform(-1.0, 2.0, 31, |t| t * t * t - t).unwrap();
        for t in [-0.93, 0.111, 1.97] {
            assert!((f.eval_cubic(t) - (t * t * t - t)).abs() < 1e-12);
        }
    }
}
