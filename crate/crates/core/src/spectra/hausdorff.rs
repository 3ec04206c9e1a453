//! Hausdorff distance between polylines in the plane.
//!
//! The excess `sup_{p in A} dist(p, B)` is taken over the continuous
//! polyline `A`, not only its vertices. Along a segment of `A` the distance
//! to each segment of `B` is convex, so the maximum of `dist(., B)` over a
//! parameter interval is bounded by the smallest per-segment maximum at its
//! two ends. Branch and bound on that bound converges to the exact supremum.

type Point = (f64, f64);

const GAP: f64 = 1e-15;
const MAX_DEPTH: usize = 60;

fn point_segment(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let u = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qx, qy) = (a.0 + u * dx, a.1 + u * dy);
    (p.0 - qx).hypot(p.1 - qy)
}

fn distances(p: Point, b: &[Point]) -> Vec<f64> {
    if b.len() == 1 {
        return vec![(p.0 - b[0].0).hypot(p.1 - b[0].1)];
    }
    b.windows(2).map(|w| point_segment(p, w[0], w[1])).collect()
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn segment_excess(p0: Point, p1: Point, b: &[Point], mut best: f64) -> f64 {
    let at = |u: f64| (p0.0 + u * (p1.0 - p0.0), p0.1 + u * (p1.1 - p0.1));
    let d0 = distances(p0, b);
    let d1 = distances(p1, b);
    best = best.max(min_of(&d0)).max(min_of(&d1));
    let mut stack = vec![(0.0, 1.0, d0, d1, 0usize)];
    while let Some((u0, u1, d0, d1, depth)) = stack.pop() {
        let bound = d0
            .iter()
            .zip(&d1)
            .map(|(x, y)| x.max(*y))
            .fold(f64::INFINITY, f64::min);
        if bound <= best + GAP || depth >= MAX_DEPTH {
            continue;
        }
        let um = 0.5 * (u0 + u1);
        let dm = distances(at(um), b);
        best = best.max(min_of(&dm));
        stack.push((u0, um, d0, dm.clone(), depth + 1));
        stack.push((um, u1, dm, d1, depth + 1));
    }
    best
}

/// `sup_{p in A} dist(p, B)` for polylines given by their vertices.
pub fn polyline_excess(a: &[Point], b: &[Point]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    if a.len() == 1 {
        return min_of(&distances(a[0], b));
    }
    a.windows(2)
        .fold(0.0, |best, w| segment_excess(w[0], w[1], b, best))
}

pub fn polyline_hausdorff(a: &[Point], b: &[Point]) -> f64 {
    polyline_excess(a, b).max(polyline_excess(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points() {
        assert_eq!(polyline_hausdorff(&[(0.0, 0.0)], &[(3.0, 4.0)]), 5.0);
    }

    #[test]
    fn interior_crossing_is_found() {
        // the vertices of A are at distance 1 from B, its midpoint farther
        let a = [(0.0, 0.0), (2.0, 0.0)];
        let b = [(0.0, 1.0), (1.0, 10.0), (2.0, 1.0)];
        let ex = polyline_excess(&a, &b);
        let brute = (0..=100_000)
            .map(|i| min_of(&distances((2.0 * i as f64 / 1e5, 0.0), &b)))
            .fold(0.0, f64::max);
        assert!(ex > 1.0 + 0.1 && ex >= brute - 1e-15 && ex <= brute + 1e-9, "{ex} {brute}");
        let b = [(0.0, 0.0)];
        let a = [(-1.0, 1.0), (1.0, 1.0)];
        assert!((polyline_excess(&a, &b) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn subset_has_zero_excess() {
        let b = [(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)];
        let a = [(0.5, 0.5), (1.0, 1.0), (1.5, 0.75)];
        assert!(polyline_excess(&a, &b) < 1e-15);
        assert!(polyline_excess(&b, &a) > 0.5);
    }
}
