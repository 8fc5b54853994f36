//! Re-validation of a certificate from its stored data. Uses only exact
//! linear algebra and polygon primitives: the systems, the assignment count
//! and the trapezoids are recomputed here without the construction code.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::NormCertificate;
use crate::linalg::{Mat, RatInterval, Rational};
use crate::norms::{box_corners_ok, ConvexPolygon};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum CheckFailure {
    #[error("box has the wrong dimension or leaves [-delta0, delta0]^m")]
    BoxOutOfRange,
    #[error("some B1(t) over the box is degenerate or not η-short")]
    PolygonFamily,
    #[error("{found} kill records, expected {expected}")]
    AssignmentCount { found: u128, expected: u128 },
    #[error("assignment {alpha:?} is not admissible")]
    NotAdmissible { alpha: Vec<usize> },
    #[error("assignment {alpha:?} appears twice")]
    Duplicate { alpha: Vec<usize> },
    #[error("y is zero or not left-null for {alpha:?}")]
    NotLeftNull { alpha: Vec<usize> },
    #[error("stored functional does not equal yᵀb(t) for {alpha:?}")]
    WrongFunctional { alpha: Vec<usize> },
    #[error("h is not of the recorded sign on the box for {alpha:?}")]
    SignNotDefinite { alpha: Vec<usize> },
    #[error("the degenerate flag is wrong")]
    DegenerateFlag,
    #[error("witness is missing")]
    MissingWitness,
    #[error("witness polygon {which} is not B1 at the box {which}")]
    WitnessPolygon { which: String },
    #[error("witness polygons are not strictly nested")]
    NotNested,
    #[error("delta is not positive or exceeds the side gap at side pair {side}")]
    Delta { side: usize },
    #[error("trapezoid over side {side} spans an angle of at least η")]
    WideTrapezoid { side: usize },
    #[error("trapezoid areas do not add up to the frame area")]
    Tiling,
    #[error("Hausdorff bound {upper} does not stay below eps = {eps}")]
    Hausdorff { upper: Rational, eps: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub ok: bool,
    pub failures: Vec<CheckFailure>,
    pub assignments_checked: usize,
    /// Upper end of the enclosure of `max(d_H(B_in, B0), d_H(B_out, B0))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hausdorff_upper: Option<Rational>,
    /// The distance to `B0` was computed exactly (false for sampled norms).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hausdorff_exact: Option<bool>,
}

fn falling_count(l: usize, m: usize) -> u128 {
    let k = 2 * l + 1;
    if k > m {
        0
    } else {
        (m + 1 - k..=m).map(|v| v as u128).product::<u128>() * (1u128 << k)
    }
}

pub fn check_certificate(cert: &NormCertificate) -> CheckReport {
    let mut failures = Vec::new();
    let b1 = &cert.polygon;
    let m = b1.m();
    let l = cert.system.l();
    let lo = cert.bx.lo();
    let hi = cert.bx.hi();
    let d0 = &cert.delta0;
    let neg_d0 = -d0;
    let in_range = lo.len() == m && lo.iter().chain(hi).all(|v| &neg_d0 <= v && v <= d0);
    if !in_range {
        failures.push(CheckFailure::BoxOutOfRange);
        return CheckReport { ok: false, failures, assignments_checked: 0, hausdorff_upper: None, hausdorff_exact: None };
    }
    if !box_corners_ok(b1, lo, hi, &cert.eta, true, None) {
        failures.push(CheckFailure::PolygonFamily);
    }

    let expected = falling_count(l, m);
    if cert.degenerate != (expected == 0) {
        failures.push(CheckFailure::DegenerateFlag);
    }
    if cert.kills.len() as u128 != expected {
        failures.push(CheckFailure::AssignmentCount { found: cert.kills.len() as u128, expected });
    }
    let mut seen = BTreeSet::new();
    for k in &cert.kills {
        let alpha = k.alpha.values().to_vec();
        let classes: BTreeSet<usize> = alpha.iter().map(|a| a % m).collect();
        if alpha.len() != 2 * l + 1 || classes.len() != alpha.len() || alpha.iter().any(|&a| a >= 2 * m) {
            failures.push(CheckFailure::NotAdmissible { alpha });
            continue;
        }
        if !seen.insert(alpha.clone()) {
            failures.push(CheckFailure::Duplicate { alpha });
            continue;
        }
        // rows: <s n, u_i> for i < l, <s n, sum_j coeff u_j> after
        let mut rows = Vec::with_capacity(2 * l + 1);
        let mut coord = Vec::with_capacity(2 * l + 1);
        let mut offset = Vec::with_capacity(2 * l + 1);
        for (i, &side) in alpha.iter().enumerate() {
            let sgn = Rational::from_int(if side < m { 1 } else { -1 });
            let nx = &b1.normals()[side % m].x * &sgn;
            let ny = &b1.normals()[side % m].y * &sgn;
            let mut row = vec![Rational::zero(); 2 * l];
            for j in 0..l {
                let w = if i < l {
                    Rational::from_int(i64::from(i == j))
                } else {
                    Rational::from_int(cert.system.coeffs()[i - l][j])
                };
                row[2 * j] = &w * &nx;
                row[2 * j + 1] = &w * &ny;
            }
            rows.push(row);
            coord.push(side % m);
            offset.push(b1.offsets()[side % m].clone());
        }
        let a = Mat::from_rows(rows);
        if k.y.len() != 2 * l + 1 || k.y.iter().all(Rational::is_zero) || !a.left_mul(&k.y).iter().all(Rational::is_zero) {
            failures.push(CheckFailure::NotLeftNull { alpha });
            continue;
        }
        let mut coeffs = vec![Rational::zero(); m];
        let mut constant = Rational::zero();
        for i in 0..alpha.len() {
            coeffs[coord[i]] += &k.y[i];
            constant += &k.y[i] * &offset[i];
        }
        if k.h.coeffs != coeffs || k.h.constant != constant {
            failures.push(CheckFailure::WrongFunctional { alpha });
            continue;
        }
        let mut range = RatInterval::point(constant);
        for (j, g) in coeffs.iter().enumerate() {
            range = range.add(&RatInterval::new(lo[j].clone(), hi[j].clone()).scale(g));
        }
        if range.definite_sign() != Some(k.sign as i32) {
            failures.push(CheckFailure::SignNotDefinite { alpha });
        }
    }

    let mut hausdorff_upper = None;
    let mut hausdorff_exact = None;
    match &cert.witness {
        None => failures.push(CheckFailure::MissingWitness),
        Some(w) => {
            let mid: Vec<Rational> = lo.iter().zip(hi).map(|(a, b)| (a + b) / Rational::from_int(2)).collect();
            for (which, poly, t) in [("lo", &w.inner, lo), ("mid", &w.mid, &mid[..]), ("hi", &w.outer, hi)] {
                let expect: Vec<Rational> = b1.offsets().iter().zip(t).map(|(c, x)| c + x).collect();
                if poly.normals() != b1.normals() || poly.offsets() != expect.as_slice() {
                    failures.push(CheckFailure::WitnessPolygon { which: which.to_string() });
                }
            }
            let (ci, cm, co) = (w.inner.to_convex(), w.mid.to_convex(), w.outer.to_convex());
            let strictly_inside = |small: &ConvexPolygon, big: &crate::norms::SymmetricPolygon| {
                small.vertices().iter().all(|v| big.eval(v) < Rational::one())
            };
            if !(strictly_inside(&ci, &w.mid) && strictly_inside(&cm, &w.outer) && co.contains_polygon(&ci)) {
                failures.push(CheckFailure::NotNested);
            }
            for (side, n) in b1.normals().iter().enumerate() {
                let gap = &hi[side] - &lo[side];
                let two_delta = &w.delta * Rational::from_int(2);
                if !w.delta.is_positive() || two_delta.square() * n.norm_sq() > gap.square() {
                    failures.push(CheckFailure::Delta { side });
                    break;
                }
            }
            let sides = 2 * m;
            let mut area = Rational::zero();
            for k in 0..sides {
                let (a, b) = w.inner.side_endpoints(k);
                let (c, d) = w.outer.side_endpoints(k);
                let corners = [a.clone(), b.clone(), d.clone(), c.clone()];
                if !cert.eta.spans_below(&corners) {
                    failures.push(CheckFailure::WideTrapezoid { side: k });
                }
                area += ConvexPolygon::hull(&corners).area2();
            }
            if area != co.area2() - ci.area2() {
                failures.push(CheckFailure::Tiling);
            }
            if let Some(base) = &cert.base {
                let din = base.norm.hausdorff_to(&w.inner);
                let dout = base.norm.hausdorff_to(&w.outer);
                let upper = din.interval.hi.clone().max(dout.interval.hi.clone());
                if upper >= base.eps {
                    failures.push(CheckFailure::Hausdorff { upper: upper.clone(), eps: base.eps.clone() });
                }
                hausdorff_upper = Some(upper);
                hausdorff_exact = Some(din.exact && dout.exact);
            }
        }
    }
    CheckReport {
        ok: failures.is_empty(),
        failures,
        assignments_checked: seen.len(),
        hausdorff_upper,
        hausdorff_exact,
    }
}
