use std::f64::consts::PI;

use super::{intersect_lines, rational_unit_vector, AngleBound, ConvexPolygon, NormOracle, SymmetricPolygon};
use crate::linalg::{RatInterval, Rational, Vec2};

/// Default cap on side pairs produced by [`polygon_approx`].
pub const DEFAULT_MAX_SIDE_PAIRS: usize = 2048;

const MAX_REFINEMENTS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApproxError {
    #[error("epsilon must be positive")]
    NonPositiveEps,
    #[error("approximation needs {needed} side pairs, cap is {cap}")]
    TooManySides { needed: usize, cap: usize },
    #[error("no approximation met both postconditions after {0} refinements")]
    NoConvergence(u32),
}

/// Polygon `B1` with `d_H(B1, B0) <= eps/2`, every side η-short, and every
/// straight segment of `∂B0` bulged strictly outward.
pub fn polygon_approx(b0: &NormOracle, eps: &Rational, eta: &AngleBound) -> Result<SymmetricPolygon, ApproxError> {
    polygon_approx_capped(b0, eps, eta, DEFAULT_MAX_SIDE_PAIRS)
}

pub fn polygon_approx_capped(
    b0: &NormOracle,
    eps: &Rational,
    eta: &AngleBound,
    cap: usize,
) -> Result<SymmetricPolygon, ApproxError> {
    if !eps.is_positive() {
        return Err(ApproxError::NonPositiveEps);
    }
    let eta_rad = eta.radians();
    let mut grid = ((PI / (eta_rad / 4.0)).ceil() as usize).max(2);
    let mut sagitta = eps / &Rational::from_int(8);
    let mut pieces_factor = 2.0;
    let half_eps = eps / &Rational::from_int(2);
    for _ in 0..MAX_REFINEMENTS {
        if grid > cap {
            return Err(ApproxError::TooManySides { needed: grid, cap });
        }
        let tangent = tangent_polygon(b0, grid);
        let (points, bulged) = bulge(b0, &tangent, &sagitta, eta_rad, pieces_factor);
        let Ok(b1) = SymmetricPolygon::from_points(&points) else {
            grid *= 2;
            sagitta = &sagitta / &Rational::from_int(2);
            continue;
        };
        if b1.m() > cap {
            return Err(ApproxError::TooManySides { needed: b1.m(), cap });
        }
        let short = b1.is_eta_short(eta);
        let close = b0.hausdorff_to(&b1).interval.hi <= half_eps;
        let outward = bulged.iter().all(|mid| b1.eval(mid) < Rational::one());
        if short && close && outward {
            return Ok(b1);
        }
        if !short {
            grid *= 2;
            pieces_factor *= 2.0;
        }
        if !close || !outward {
            grid *= 2;
            sagitta = &sagitta / &Rational::from_int(2);
        }
    }
    Err(ApproxError::NoConvergence(MAX_REFINEMENTS))
}

/// Intersection of the tangent half-planes of `B0` at a grid of rational
/// unit normals plus the normals of its flat faces.
fn tangent_polygon(b0: &NormOracle, grid: usize) -> ConvexPolygon {
    let mut normals: Vec<Vec2> = (0..grid)
        .map(|k| rational_unit_vector(-PI / 2.0 + (k as f64 + 0.5) * PI / grid as f64))
        .collect();
    normals.extend(b0.face_normals());
    let mut lines: Vec<(Vec2, Rational)> = Vec::with_capacity(2 * normals.len());
    for n in normals {
        let c = b0.support_upper(&n);
        lines.push((-&n, c.clone()));
        lines.push((n, c));
    }
    let reach = lines
        .iter()
        .map(|(n, c)| c / &n.norm_sq().sqrt_bounds(20).0.max(Rational::new(1, 1 << 20)))
        .max()
        .expect("no tangent lines");
    let r = &reach * &Rational::from_int(16) + Rational::one();
    let neg = -&r;
    let mut poly = ConvexPolygon::hull(&[
        Vec2::new(r.clone(), r.clone()),
        Vec2::new(neg.clone(), r.clone()),
        Vec2::new(neg.clone(), neg.clone()),
        Vec2::new(r, neg),
    ]);
    for (n, c) in &lines {
        poly = poly.clip(n, c);
    }
    poly
}

/// Vertices of `tangent` plus parabola points over every edge lying on a flat
/// face of `B0`; also returns the face-edge midpoints that must end up
/// interior.
fn bulge(
    b0: &NormOracle,
    tangent: &ConvexPolygon,
    sagitta: &Rational,
    eta_rad: f64,
    pieces_factor: f64,
) -> (Vec<Vec2>, Vec<Vec2>) {
    let mut points = tangent.vertices().to_vec();
    let mut mids = Vec::new();
    for (a, b) in tangent.edges() {
        let d = b - a;
        let outward = Vec2::new(d.y.clone(), -&d.x);
        if !b0.face_is_segment(&outward) {
            continue;
        }
        mids.push(Vec2::new(a.x.midpoint(&b.x), a.y.midpoint(&b.y)));
        let (ax, ay) = a.to_f64();
        let (bx, by) = b.to_f64();
        let span = (ax * by - ay * bx).atan2(ax * bx + ay * by).abs();
        let k = ((pieces_factor * span / eta_rad).ceil() as usize).max(2);
        let unit = outward.scale(&outward.norm_sq().sqrt_upper(24).recip());
        let four_beta = sagitta * &Rational::from_int(4);
        for j in 1..k {
            let s = Rational::new(j as i64, k as i64);
            let lift = &four_beta * &s * (Rational::one() - &s);
            points.push(a + &d.scale(&s) + unit.scale(&lift));
        }
    }
    (points, mids)
}

/// Largest dyadic `δ0` (found by halving from a displacement bound) such
/// that every `B1(t)` with `|t_i| <= δ0` keeps all sides facet-defining,
/// keeps η-shortness when `B1` has it, and stays within `ε` of `B0`.
///
/// Each vertex of `B1(t)` is affine in the two offsets of its sides, so all
/// three properties are decided exactly at the corners of the local boxes.
pub fn choose_delta0(b1: &SymmetricPolygon, b0: &NormOracle, eps: &Rational, eta: &AngleBound) -> Option<Rational> {
    let slack = eps - &b0.hausdorff_to(b1).interval.hi;
    if !slack.is_positive() {
        return None;
    }
    let m = b1.m();
    let mut k_bound = Rational::zero();
    let mut min_side = None::<Rational>;
    for k in 0..2 * m {
        let a = b1.side_normal(k);
        let b = b1.side_normal((k + 1) % (2 * m));
        let num = RatInterval::sqrt_of(&a.norm_sq(), 20).hi + RatInterval::sqrt_of(&b.norm_sq(), 20).hi;
        let k_here = num / a.cross(&b).abs();
        k_bound = k_bound.max(k_here);
        let (s, e) = b1.side_endpoints(k);
        let len = RatInterval::sqrt_of(&(e - s).norm_sq(), 20).lo;
        min_side = Some(min_side.map_or(len.clone(), |x| x.min(len)));
    }
    let min_side = min_side.unwrap_or_else(Rational::zero);
    let mut start = (&slack / &(&Rational::from_int(2) * &k_bound))
        .min(&min_side / &(&Rational::from_int(4) * &k_bound));
    for c in b1.offsets() {
        start = start.min(c / &Rational::from_int(2));
    }
    let mut delta = dyadic_floor(&start);
    let keep_short = b1.is_eta_short(eta);
    for _ in 0..200 {
        if delta.is_positive() && delta_ok(b1, b0, eps, &slack, eta, keep_short, &delta) {
            return Some(delta);
        }
        delta = &delta / &Rational::from_int(2);
    }
    None
}

/// Largest `2^-k` not above `x` for `0 < x < 1`, else `floor(x)`.
fn dyadic_floor(x: &Rational) -> Rational {
    if *x >= Rational::one() {
        return Rational::from_int(x.floor());
    }
    let mut d = Rational::one();
    while d > *x {
        d = &d / &Rational::from_int(2);
    }
    d
}

pub(crate) fn delta_ok(
    b1: &SymmetricPolygon,
    b0: &NormOracle,
    eps: &Rational,
    slack: &Rational,
    eta: &AngleBound,
    keep_short: bool,
    delta: &Rational,
) -> bool {
    if !box_corners_ok(b1, &vec![-delta; b1.m()], &vec![delta.clone(); b1.m()], eta, keep_short, Some(slack)) {
        return false;
    }
    // the extreme uniform offsets, checked end to end
    for t in [vec![-delta; b1.m()], vec![delta.clone(); b1.m()]] {
        match b1.offset(&t) {
            Ok(p) if b0.hausdorff_to(&p).interval.hi < *eps => {}
            _ => return false,
        }
    }
    true
}

/// Exact check that every `B1(t)` with `lo <= t <= hi` has all sides of
/// positive length, that they stay η-short when `keep_short`, and (with
/// `max_shift`) that every vertex moves less than `max_shift`.
pub fn box_corners_ok(
    b1: &SymmetricPolygon,
    lo: &[Rational],
    hi: &[Rational],
    eta: &AngleBound,
    keep_short: bool,
    max_shift: Option<&Rational>,
) -> bool {
    let m = b1.m();
    let n = 2 * m;
    let line = |k: usize, t: &Rational| (b1.side_normal(k), b1.side_offset(k) + t);
    let vertex_at = |k: usize, ti: &Rational, tj: &Rational| {
        let (a, alpha) = line(k, ti);
        let (b, beta) = line((k + 1) % n, tj);
        intersect_lines(&a, &alpha, &b, &beta)
    };
    if let Some(shift) = max_shift {
        let shift_sq = shift.square();
        for k in 0..n {
            let (i, j) = (k % m, (k + 1) % m);
            let base = &b1.vertices()[k];
            for ti in [&lo[i], &hi[i]] {
                for tj in [&lo[j], &hi[j]] {
                    if (&vertex_at(k, ti, tj) - base).norm_sq() >= shift_sq {
                        return false;
                    }
                }
            }
        }
    }
    for k in 0..n {
        let prev = (k + n - 1) % n;
        let mut vars = vec![prev % m, k % m, (k + 1) % m];
        vars.sort_unstable();
        vars.dedup();
        let along = b1.side_normal(k).perp().scale(&Rational::from_int(b1.orientation()));
        let mut corners = Vec::new();
        for mask in 0..(1u32 << vars.len()) {
            let pick = |idx: usize| {
                let pos = vars.iter().position(|&v| v == idx).expect("variable listed");
                if mask >> pos & 1 == 1 {
                    &hi[idx]
                } else {
                    &lo[idx]
                }
            };
            let start = vertex_at(prev, pick(prev % m), pick(k % m));
            let end = vertex_at(k, pick(k % m), pick((k + 1) % m));
            if !(&end - &start).dot(&along).is_positive() {
                return false;
            }
            corners.push(start);
            corners.push(end);
        }
        if keep_short && !eta.spans_below(&corners) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, v2};
    use crate::norms::square;

    fn thirty_degrees() -> AngleBound {
        AngleBound::from_sin_sq(rat(1, 4)).unwrap()
    }

    #[test]
    fn disc_approximation() {
        let eta = thirty_degrees();
        let eps = rat(1, 5);
        let b1 = polygon_approx(&NormOracle::Euclidean, &eps, &eta).unwrap();
        assert!(b1.m() >= 12);
        assert!(b1.is_eta_short(&eta));
        let d = NormOracle::Euclidean.hausdorff_to(&b1);
        assert!(d.interval.hi <= rat(1, 10));
    }

    #[test]
    fn square_is_bulged() {
        let eta = thirty_degrees();
        let eps = rat(1, 4);
        let b0 = NormOracle::polygon(square());
        let b1 = polygon_approx(&b0, &eps, &eta).unwrap();
        assert!(b1.is_eta_short(&eta));
        for mid in [v2(1, 0), v2(0, 1), v2(-1, 0), v2(0, -1)] {
            assert!(b1.eval(&mid) < rat(1, 1));
        }
        assert!(b0.hausdorff_to(&b1).interval.hi <= rat(1, 8));
    }

    #[test]
    fn cap_is_enforced() {
        let tiny = AngleBound::from_sin_sq(rat(1, 1_000_000_000)).unwrap();
        let err = polygon_approx_capped(&NormOracle::Euclidean, &rat(1, 5), &tiny, 64).unwrap_err();
        assert!(matches!(err, ApproxError::TooManySides { .. }));
    }

    #[test]
    fn delta0_for_square_with_half_margin() {
        let b0 = NormOracle::polygon(square());
        let eta = AngleBound::from_sin_sq(rat(1, 1)).unwrap();
        let d = choose_delta0(&square(), &b0, &rat(1, 2), &eta).unwrap();
        assert!(d >= rat(1, 8));
        let grown = square().offset(&[d.clone(), d.clone()]).unwrap();
        assert!(b0.hausdorff_to(&grown).interval.hi < rat(1, 2));
    }
}
