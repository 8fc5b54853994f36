use serde::{Deserialize, Serialize};

use crate::linalg::{Rational, Vec2};

/// A line-angle bound η carried as `sin²η`, so every separation test stays a
/// rational inequality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AngleBoundRepr", into = "AngleBoundRepr")]
pub struct AngleBound {
    sin_sq: Rational,
}

#[derive(Serialize, Deserialize)]
struct AngleBoundRepr {
    sin_sq_bound: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("sin² bound must lie in (0, 1], got {0}")]
pub struct AngleBoundError(pub Rational);

impl AngleBound {
    pub fn from_sin_sq(sin_sq: Rational) -> Result<Self, AngleBoundError> {
        if sin_sq.is_positive() && sin_sq <= Rational::one() {
            Ok(AngleBound { sin_sq })
        } else {
            Err(AngleBoundError(sin_sq))
        }
    }

    pub fn sin_sq(&self) -> &Rational {
        &self.sin_sq
    }

    /// η in radians (floating point, for grid construction only).
    pub fn radians(&self) -> f64 {
        self.sin_sq.to_f64().sqrt().clamp(0.0, 1.0).asin()
    }

    /// Lines spanned by `u` and `v` meet at an angle of at least η.
    pub fn separated(&self, u: &Vec2, v: &Vec2) -> bool {
        assert!(!u.is_zero() && !v.is_zero(), "separation test on a zero vector");
        u.cross(v).square() >= &self.sin_sq * &u.norm_sq() * v.norm_sq()
    }

    /// The angle at the origin between rays through `u` and `v` is strictly
    /// below η (η ≤ 90°, so the rays must also make an acute angle).
    pub fn ray_angle_below(&self, u: &Vec2, v: &Vec2) -> bool {
        u.dot(v).is_positive() && u.cross(v).square() < &self.sin_sq * &u.norm_sq() * v.norm_sq()
    }

    /// Every pair of points in `pts` subtends an angle strictly below η at
    /// the origin. Applied to the corners of a convex piece not containing
    /// the origin this bounds the angle of the whole piece.
    pub fn spans_below(&self, pts: &[Vec2]) -> bool {
        pts.iter()
            .enumerate()
            .all(|(i, a)| pts[i + 1..].iter().all(|b| self.ray_angle_below(a, b)))
    }
}

impl From<AngleBound> for AngleBoundRepr {
    fn from(a: AngleBound) -> Self {
        AngleBoundRepr { sin_sq_bound: a.sin_sq }
    }
}

impl TryFrom<AngleBoundRepr> for AngleBound {
    type Error = AngleBoundError;
    fn try_from(r: AngleBoundRepr) -> Result<Self, Self::Error> {
        AngleBound::from_sin_sq(r.sin_sq_bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, v2};

    #[test]
    fn separation_examples() {
        let quarter = AngleBound::from_sin_sq(rat(1, 4)).unwrap();
        assert!(quarter.separated(&v2(1, 0), &v2(0, 1)));
        assert!(quarter.separated(&v2(1, 0), &v2(1, 1)));
        let tiny = AngleBound::from_sin_sq(rat(1, 1_000_000)).unwrap();
        assert!(!tiny.separated(&v2(1, 0), &v2(2, 0)));
        assert!(!tiny.separated(&v2(1, 0), &v2(-3, 0)));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(AngleBound::from_sin_sq(rat(0, 1)).is_err());
        assert!(AngleBound::from_sin_sq(rat(3, 2)).is_err());
        assert!(AngleBound::from_sin_sq(rat(1, 1)).is_ok());
    }

    #[test]
    fn ray_angles() {
        let a = AngleBound::from_sin_sq(rat(1, 4)).unwrap(); // 30°
        assert!(a.ray_angle_below(&v2(10, 1), &v2(10, -1)));
        assert!(!a.ray_angle_below(&v2(1, 0), &v2(1, 1)));
        assert!(!a.ray_angle_below(&v2(1, 0), &v2(-1, 0)));
    }
}
