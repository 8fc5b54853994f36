use std::fmt;

use serde::{Deserialize, Serialize};

use super::Rational;

/// A closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RatInterval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval with lo > hi");
        RatInterval { lo, hi }
    }

    pub fn point(v: Rational) -> Self {
        RatInterval { lo: v.clone(), hi: v }
    }

    /// Interval enclosing `sqrt(v)` with width at most `2^-bits`.
    pub fn sqrt_of(v: &Rational, bits: u32) -> Self {
        let (lo, hi) = v.sqrt_bounds(bits);
        if lo.square() == *v {
            return RatInterval::point(lo);
        }
        RatInterval { lo, hi }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Rational::zero())
    }

    /// Strictly positive or strictly negative throughout; returns the sign.
    pub fn definite_sign(&self) -> Option<i32> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else {
            None
        }
    }

    pub fn add(&self, other: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    /// `k * [lo, hi]`.
    pub fn scale(&self, k: &Rational) -> RatInterval {
        let a = k * &self.lo;
        let b = k * &self.hi;
        if a <= b {
            RatInterval { lo: a, hi: b }
        } else {
            RatInterval { lo: b, hi: a }
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.lo.to_f64(), self.hi.to_f64())
    }
}

impl fmt::Debug for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn arithmetic() {
        let a = RatInterval::new(rat(-1, 1), rat(2, 1));
        assert_eq!(a.scale(&rat(-2, 1)), RatInterval::new(rat(-4, 1), rat(2, 1)));
        assert_eq!(a.add(&RatInterval::point(rat(3, 1))), RatInterval::new(rat(2, 1), rat(5, 1)));
        assert_eq!(a.definite_sign(), None);
        assert_eq!(RatInterval::new(rat(1, 4), rat(1, 1)).definite_sign(), Some(1));
    }

    #[test]
    fn sqrt_exact_square_is_a_point() {
        assert_eq!(RatInterval::sqrt_of(&rat(9, 16), 30), RatInterval::point(rat(3, 4)));
        let two = RatInterval::sqrt_of(&rat(2, 1), 30);
        assert!(two.width() <= rat(1, 1 << 30));
    }
}
