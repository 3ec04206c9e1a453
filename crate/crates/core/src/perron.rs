//! Perron–Frobenius data of small dense nonnegative matrices.
//!
//! Power iteration is run on the repeatedly squared matrix: after `m`
//! squarings the iterate is `A^(2^m)` rescaled, so a spectral gap ratio of
//! `1 - eps` is resolved after `log2(1/eps)` squarings instead of `1/eps`
//! plain iterations. A short plain power-iteration pass polishes the vectors.

/// Square row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    n: usize,
    data: Vec<f64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Dense {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Dense::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has wrong length");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().cloned().fold(0.0, f64::max)
    }

    fn scale(&mut self, s: f64) {
        for x in &mut self.data {
            *x *= s;
        }
    }

    pub fn matmul(&self, other: &Dense) -> Dense {
        let n = self.n;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let other_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn vec_mul(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(&self.data[i * n..(i + 1) * n]) {
                *o += vi * a;
            }
        }
        out
    }
}

const MAX_SQUARINGS: usize = 96;
const MAX_POLISH: usize = 64;
const VECTOR_TOL: f64 = 4e-15;
const TINY: f64 = 1e-280;

/// Leading eigenvalue (as a logarithm) with right and left eigenvectors.
///
/// Both vectors are normalized to unit maximum entry.
#[derive(Debug, Clone)]
pub struct PerronPair {
    pub log_lambda: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
}

fn normalize_max(v: &mut [f64]) -> f64 {
    let m = v.iter().cloned().fold(0.0, f64::max);
    if m > 0.0 {
        for x in v.iter_mut() {
            *x /= m;
        }
    }
    m
}

/// Largest entrywise relative change. Tiny entries still matter: the
/// stationary measure multiplies left and right components that can sit
/// dozens of orders of magnitude below the maximum.
fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let m = x.abs().max(y.abs());
            if m < TINY {
                0.0
            } else {
                (x - y).abs() / m
            }
        })
        .fold(0.0, f64::max)
}

/// Perron root and vectors of a nonnegative matrix whose dominant
/// eigenvalue is simple (irreducible and aperiodic up to underflowed
/// entries). Returns `None` for the zero matrix.
pub fn perron_pair(m: &Dense) -> Option<PerronPair> {
    let n = m.dim();
    let top = m.max_entry();
    if n == 0 || top <= 0.0 {
        return None;
    }
    let mut shifted = m.clone();
    shifted.scale(1.0 / top);
    // M + cI has the same eigenvectors, and with c near rho(M) no other
    // eigenvalue comes close to the Perron root in modulus, even when M is
    // periodic to machine precision
    let c = radius_estimate(&shifted, 24).exp();
    if c.is_finite() {
        for i in 0..n {
            shifted.add_to(i, i, c);
        }
    }
    let mut b = shifted.clone();
    for _ in 0..MAX_SQUARINGS {
        let mut next = b.matmul(&b);
        let s = next.max_entry();
        if s <= 0.0 {
            return None;
        }
        next.scale(1.0 / s);
        let diff = max_rel_diff(&next.data, &b.data);
        b = next;
        if diff <= VECTOR_TOL {
            break;
        }
    }
    let ones = vec![1.0; n];
    let mut right = b.mul_vec(&ones);
    let mut left = b.vec_mul(&ones);
    normalize_max(&mut right);
    normalize_max(&mut left);

    for _ in 0..MAX_POLISH {
        let mut r = shifted.mul_vec(&right);
        if normalize_max(&mut r) <= 0.0 {
            break;
        }
        let d = max_rel_diff(&r, &right);
        right = r;
        if d <= VECTOR_TOL {
            break;
        }
    }
    for _ in 0..MAX_POLISH {
        let mut l = shifted.vec_mul(&left);
        if normalize_max(&mut l) <= 0.0 {
            break;
        }
        let d = max_rel_diff(&l, &left);
        left = l;
        if d <= VECTOR_TOL {
            break;
        }
    }

    let mr = m.mul_vec(&right);
    let num: f64 = left.iter().zip(&mr).map(|(a, b)| a * b).sum();
    let den: f64 = left.iter().zip(&right).map(|(a, b)| a * b).sum();
    if !(num > 0.0 && den > 0.0) {
        return None;
    }
    Some(PerronPair {
        log_lambda: (num / den).ln(),
        right,
        left,
    })
}

/// Logarithm of the spectral radius of an arbitrary nonnegative matrix,
/// `-inf` when the matrix is nilpotent.
///
/// Uses `log rho = lim (1/N) log ||A^N||` along `N = 2^j`, which needs no
/// irreducibility or aperiodicity.
pub fn log_spectral_radius(m: &Dense) -> f64 {
    radius_estimate(m, 64)
}

fn radius_estimate(m: &Dense, squarings: usize) -> f64 {
    let top = m.max_entry();
    if m.dim() == 0 || top <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let mut b = m.clone();
    b.scale(1.0 / top);
    let mut ell = top.ln();
    let mut weight = 0.5;
    for _ in 0..squarings {
        let mut next = b.matmul(&b);
        let s = next.max_entry();
        if s <= 0.0 {
            return f64::NEG_INFINITY;
        }
        next.scale(1.0 / s);
        ell += s.ln() * weight;
        weight *= 0.5;
        b = next;
    }
    ell
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_mean_root() {
        let m = Dense::from_rows(&[vec![1.0, 1.0], vec![1.0, 0.0]]);
        let p = perron_pair(&m).unwrap();
        let gamma = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((p.log_lambda - gamma.ln()).abs() < 1e-14);
        assert!((p.right[0] / p.right[1] - gamma).abs() < 1e-12);
    }

    #[test]
    fn periodic_below_machine_precision() {
        // eigenvalues a +- sqrt(bc) with a tiny against sqrt(bc)
        let (a, b, c) = ((-158.8f64).exp(), (-197.6f64).exp(), 1.0);
        let m = Dense::from_rows(&[vec![a, b], vec![c, a]]);
        let p = perron_pair(&m).unwrap();
        assert!((p.log_lambda - (-98.8)).abs() < 1e-12, "{}", p.log_lambda);
        let ratio = p.right[0] / p.right[1];
        assert!((ratio.ln() - (-98.8)).abs() < 1e-9, "{ratio}");
    }

    #[test]
    fn tiny_components_are_resolved() {
        // exp(s * phi) on the full 2-shift at s = -60, where the fixed point
        // and the 2-cycle have nearly equal averages
        let v: [f64; 4] = [-0.7207422736242189, -1.8328612193224052, 0.39248472559211733, 0.0];
        let w: Vec<f64> = v.iter().map(|x| (-60.0 * x).exp()).collect();
        let m = Dense::from_rows(&[vec![w[0], w[1]], vec![w[2], w[3]]]);
        let p = perron_pair(&m).unwrap();
        let (tr, det) = (w[0] + w[3], w[0] * w[3] - w[1] * w[2]);
        let lambda = (tr + (tr * tr - 4.0 * det).sqrt()) / 2.0;
        assert!((p.log_lambda - lambda.ln()).abs() < 1e-12);
        // right eigenvector (w1, lambda - w0), left (w2, lambda - w0)
        let r = p.right[0] / p.right[1];
        let l = p.left[0] / p.left[1];
        assert!((r / (w[1] / (lambda - w[0])) - 1.0).abs() < 1e-10, "{r}");
        assert!((l / (w[2] / (lambda - w[0])) - 1.0).abs() < 1e-10, "{l}");
    }

    #[test]
    fn near_periodic_matrix_converges() {
        // eigenvalues 1 and -(1 - 1e-9)
        let e = 1e-9;
        let m = Dense::from_rows(&[vec![e / 2.0, 1.0 - e / 2.0], vec![1.0, 0.0]]);
        let p = perron_pair(&m).unwrap();
        assert!(p.log_lambda.abs() < 1e-13, "{}", p.log_lambda);
    }

    #[test]
    fn spectral_radius_handles_cycles_and_nilpotents() {
        let cycle = Dense::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ]);
        assert_eq!(log_spectral_radius(&cycle), 0.0);
        let nil = Dense::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert_eq!(log_spectral_radius(&nil), f64::NEG_INFINITY);
        let two = Dense::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!((log_spectral_radius(&two) - 2f64.ln()).abs() < 1e-15);
    }
}
