use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rational;

/// Rational point / vector in the plane. Orders lexicographically (x, then y).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Vec2 {
    pub x: Rational,
    pub y: Rational,
}

impl Vec2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        Vec2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Vec2::new(Rational::from_int(x), Rational::from_int(y))
    }

    pub fn zero() -> Self {
        Vec2::default()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn dot(&self, other: &Vec2) -> Rational {
        &self.x * &other.x + &self.y * &other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(&self, other: &Vec2) -> Rational {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn norm_sq(&self) -> Rational {
        self.dot(self)
    }

    pub fn scale(&self, k: &Rational) -> Vec2 {
        Vec2::new(&self.x * k, &self.y * k)
    }

    /// Counter-clockwise quarter turn.
    pub fn perp(&self) -> Vec2 {
        Vec2::new(-&self.y, self.x.clone())
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }

    /// Squared Euclidean distance from `self` to the closed segment `[a, b]`.
    pub fn dist_sq_to_segment(&self, a: &Vec2, b: &Vec2) -> Rational {
        let ab = b - a;
        let len = ab.norm_sq();
        if len.is_zero() {
            return (self - a).norm_sq();
        }
        let t = (self - a).dot(&ab) / &len;
        if !t.is_positive() {
            (self - a).norm_sq()
        } else if t >= Rational::one() {
            (self - b).norm_sq()
        } else {
            let foot = a + &ab.scale(&t);
            (self - &foot).norm_sq()
        }
    }
}

impl fmt::Debug for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

macro_rules! vec_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Vec2> for &Vec2 {
            type Output = Vec2;
            fn $method(self, rhs: &Vec2) -> Vec2 {
                Vec2::new((&self.x).$method(&rhs.x), (&self.y).$method(&rhs.y))
            }
        }
        impl $trait<Vec2> for Vec2 {
            type Output = Vec2;
            fn $method(self, rhs: Vec2) -> Vec2 {
                Vec2::new(self.x.$method(rhs.x), self.y.$method(rhs.y))
            }
        }
        impl $trait<&Vec2> for Vec2 {
            type Output = Vec2;
            fn $method(self, rhs: &Vec2) -> Vec2 {
                Vec2::new(self.x.$method(&rhs.x), self.y.$method(&rhs.y))
            }
        }
    };
}
vec_binop!(Add, add);
vec_binop!(Sub, sub);

impl Neg for &Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-&self.x, -&self.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

// Serialized as a two-element array of rational strings.
impl Serialize for Vec2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [&self.x, &self.y].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Vec2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [x, y] = <[Rational; 2]>::deserialize(deserializer)?;
        Ok(Vec2 { x, y })
    }
}

/// Shorthand for integer-coordinate vectors.
pub fn v2(x: i64, y: i64) -> Vec2 {
    Vec2::from_ints(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn lexicographic_order() {
        let mut v = vec![v2(1, 1), v2(-1, 1), v2(1, 0), v2(0, 1)];
        v.sort();
        assert_eq!(v, vec![v2(-1, 1), v2(0, 1), v2(1, 0), v2(1, 1)]);
    }

    #[test]
    fn segment_distance() {
        let a = v2(0, 0);
        let b = v2(2, 0);
        assert_eq!(v2(1, 1).dist_sq_to_segment(&a, &b), rat(1, 1));
        assert_eq!(v2(3, 1).dist_sq_to_segment(&a, &b), rat(2, 1));
        assert_eq!(v2(-1, 0).dist_sq_to_segment(&a, &b), rat(1, 1));
    }

    #[test]
    fn json_shape() {
        let v = Vec2::new(rat(1, 2), rat(-3, 1));
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["1/2","-3"]"#);
        assert_eq!(serde_json::from_str::<Vec2>(&s).unwrap(), v);
    }
}
