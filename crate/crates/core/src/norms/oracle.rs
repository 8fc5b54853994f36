use serde::{Deserialize, Serialize};

use super::{hausdorff, SymmetricPolygon};
use crate::linalg::{RatInterval, Rational, Vec2};

/// Tolerance used by the floating-point unit test of non-integer ℓ_p norms.
pub const PNORM_UNIT_TOLERANCE: f64 = 1e-12;

/// A planar norm given by its unit ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NormOracle {
    Polygon { polygon: SymmetricPolygon },
    Pnorm { p: Rational },
    Euclidean,
}

/// Hausdorff distance bound together with whether it was computed exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceBound {
    pub interval: RatInterval,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("p-norm exponent must be at least 1, got {0}")]
    BadExponent(Rational),
}

/// Exact or tolerance-based membership of a vector on the unit sphere.
pub trait UnitNorm: Sync {
    fn is_unit(&self, z: &Vec2) -> bool;
}

impl UnitNorm for SymmetricPolygon {
    fn is_unit(&self, z: &Vec2) -> bool {
        self.eval(z) == Rational::one()
    }
}

impl UnitNorm for NormOracle {
    fn is_unit(&self, z: &Vec2) -> bool {
        match self {
            NormOracle::Polygon { polygon } => polygon.is_unit(z),
            NormOracle::Euclidean => z.norm_sq() == Rational::one(),
            NormOracle::Pnorm { p } => {
                if p.is_integer() {
                    let e = p.numer().to_string().parse::<i32>().unwrap_or(i32::MAX);
                    if e < 64 {
                        return z.x.abs().pow(e) + z.y.abs().pow(e) == Rational::one();
                    }
                }
                (self.eval_f64(z.to_f64()) - 1.0).abs() <= PNORM_UNIT_TOLERANCE
            }
        }
    }
}

impl NormOracle {
    pub fn pnorm(p: Rational) -> Result<Self, OracleError> {
        if p < Rational::one() {
            return Err(OracleError::BadExponent(p));
        }
        Ok(NormOracle::Pnorm { p })
    }

    pub fn polygon(polygon: SymmetricPolygon) -> Self {
        NormOracle::Polygon { polygon }
    }

    pub fn as_polygon(&self) -> Option<&SymmetricPolygon> {
        match self {
            NormOracle::Polygon { polygon } => Some(polygon),
            _ => None,
        }
    }

    pub fn eval_f64(&self, (x, y): (f64, f64)) -> f64 {
        match self {
            NormOracle::Polygon { polygon } => polygon.eval(&Vec2::new(
                Rational::from_f64(x).unwrap_or_default(),
                Rational::from_f64(y).unwrap_or_default(),
            ))
            .to_f64(),
            NormOracle::Euclidean => x.hypot(y),
            NormOracle::Pnorm { p } => {
                let p = p.to_f64();
                (x.abs().powf(p) + y.abs().powf(p)).powf(1.0 / p)
            }
        }
    }

    /// Upper bound on the support function `max_{z in B0} <n, z>`; exact for
    /// polygons, the ℓ_1 ball and unit-length normals of the disc.
    pub fn support_upper(&self, n: &Vec2) -> Rational {
        match self {
            NormOracle::Polygon { polygon } => polygon.support(n),
            NormOracle::Euclidean => n.norm_sq().sqrt_upper(48),
            NormOracle::Pnorm { p } => {
                if *p == Rational::one() {
                    return n.x.abs().max(n.y.abs());
                }
                if *p == Rational::from_int(2) {
                    return n.norm_sq().sqrt_upper(48);
                }
                let pf = p.to_f64();
                let q = pf / (pf - 1.0);
                let (x, y) = n.to_f64();
                let h = (x.abs().powf(q) + y.abs().powf(q)).powf(1.0 / q);
                Rational::from_f64_dyadic(h * (1.0 + 1e-10) + 1e-12, 52)
            }
        }
    }

    /// Outward normals of the straight segments on the unit sphere.
    pub fn face_normals(&self) -> Vec<Vec2> {
        match self {
            NormOracle::Polygon { polygon } => polygon.normals().to_vec(),
            NormOracle::Pnorm { p } if *p == Rational::one() => {
                vec![Vec2::from_ints(1, 1), Vec2::from_ints(-1, 1)]
            }
            _ => Vec::new(),
        }
    }

    /// The face of the unit ball in direction `n` is a segment.
    pub fn face_is_segment(&self, n: &Vec2) -> bool {
        self.face_normals()
            .iter()
            .flat_map(|f| [f.clone(), -f])
            .any(|f| f.cross(n).is_zero() && f.dot(n).is_positive())
    }

    /// Hausdorff distance from a polygon (containing 0) to this unit ball.
    pub fn hausdorff_to(&self, poly: &SymmetricPolygon) -> DistanceBound {
        match self {
            NormOracle::Polygon { polygon } => {
                DistanceBound { interval: hausdorff(poly, polygon), exact: true }
            }
            NormOracle::Euclidean => DistanceBound { interval: disc_distance(poly), exact: true },
            NormOracle::Pnorm { p } if *p == Rational::from_int(2) => {
                DistanceBound { interval: disc_distance(poly), exact: true }
            }
            NormOracle::Pnorm { .. } => self.sampled_distance(poly),
        }
    }

    /// `sup_u |h_P(u) - h_B0(u)|` over a dense direction grid plus a
    /// Lipschitz allowance for the gaps.
    fn sampled_distance(&self, poly: &SymmetricPolygon) -> DistanceBound {
        const SAMPLES: usize = 1 << 16;
        let verts: Vec<(f64, f64)> = poly.vertices().iter().map(Vec2::to_f64).collect();
        let radius = verts.iter().map(|(x, y)| x.hypot(*y)).fold(0.0f64, f64::max).max(1.0);
        let mut best = 0.0f64;
        for s in 0..SAMPLES {
            let th = std::f64::consts::PI * 2.0 * s as f64 / SAMPLES as f64;
            let (ux, uy) = (th.cos(), th.sin());
            let hp = verts.iter().map(|(x, y)| x * ux + y * uy).fold(f64::MIN, f64::max);
            let hb = self.support_f64((ux, uy));
            best = best.max((hp - hb).abs());
        }
        let slack = 2.0 * radius * std::f64::consts::PI * 2.0 / SAMPLES as f64;
        let lo = Rational::from_f64_dyadic(best, 40);
        let hi = Rational::from_f64_dyadic(best + slack, 40) + Rational::new(1, 1u64 << 40);
        DistanceBound { interval: RatInterval::new(lo.min(hi.clone()), hi), exact: false }
    }

    fn support_f64(&self, (x, y): (f64, f64)) -> f64 {
        match self {
            NormOracle::Polygon { polygon } => polygon
                .vertices()
                .iter()
                .map(|v| {
                    let (a, b) = v.to_f64();
                    a * x + b * y
                })
                .fold(f64::MIN, f64::max),
            NormOracle::Euclidean => x.hypot(y),
            NormOracle::Pnorm { p } => {
                let pf = p.to_f64();
                if pf == 1.0 {
                    return x.abs().max(y.abs());
                }
                let q = pf / (pf - 1.0);
                (x.abs().powf(q) + y.abs().powf(q)).powf(1.0 / q)
            }
        }
    }
}

/// `d_H(P, D) = max(max_v |v| - 1, 1 - min_i c_i/|n_i|, 0)` for a polygon
/// containing the origin and the unit disc.
fn disc_distance(poly: &SymmetricPolygon) -> RatInterval {
    const BITS: u32 = 40;
    let one = Rational::one();
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for v in poly.vertices() {
        let r = RatInterval::sqrt_of(&v.norm_sq(), BITS);
        lo = lo.max(&r.lo - &one);
        hi = hi.max(&r.hi - &one);
    }
    for (n, c) in poly.normals().iter().zip(poly.offsets()) {
        let len = RatInterval::sqrt_of(&n.norm_sq(), BITS);
        // c/|n| lies in [c/len.hi, c/len.lo]
        lo = lo.max(&one - c / &len.lo);
        hi = hi.max(&one - c / &len.hi);
    }
    RatInterval::new(lo, hi)
}
