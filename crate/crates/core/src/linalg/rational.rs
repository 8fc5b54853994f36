use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
///
/// Serializes as `"num/den"`, or as `"num"` when the denominator is one.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer in rational literal {0:?}")]
    BadInteger(String),
    #[error("zero denominator in rational literal {0:?}")]
    ZeroDenominator(String),
}

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        let den = den.into();
        assert!(!den.is_zero(), "rational with zero denominator");
        Rational(BigRational::new(num.into(), den))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// -1, 0 or +1.
    pub fn signum(&self) -> i32 {
        if self.0.is_zero() {
            0
        } else if self.0.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    pub fn square(&self) -> Self {
        Rational(&self.0 * &self.0)
    }

    pub fn pow(&self, exp: i32) -> Self {
        Rational(num_traits::Pow::pow(&self.0, exp))
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // Very large/small operands: divide in the float domain after scaling.
            let n = self.0.numer().to_f64().unwrap_or(f64::INFINITY);
            let d = self.0.denom().to_f64().unwrap_or(f64::INFINITY);
            n / d
        })
    }

    /// Exact conversion of a finite float.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Rational)
    }

    /// Nearest rational with denominator `2^bits` (round half away from zero).
    pub fn from_f64_dyadic(x: f64, bits: u32) -> Self {
        let scale = (2.0f64).powi(bits as i32);
        let n = (x * scale).round();
        let n = BigInt::from(n as i128);
        Rational::new(n, BigInt::one() << bits)
    }

    /// Midpoint of `self` and `other`.
    pub fn midpoint(&self, other: &Self) -> Self {
        (self + other) / Rational::from_int(2)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn into_big(self) -> BigRational {
        self.0
    }

    pub fn from_big(r: BigRational) -> Self {
        Rational(r)
    }

    /// Floor of the square root scaled: returns `(lo, hi)` with
    /// `lo^2 <= self <= hi^2` and `hi - lo = 2^-bits`.
    pub fn sqrt_bounds(&self, bits: u32) -> (Rational, Rational) {
        assert!(!self.is_negative(), "square root of a negative rational");
        if self.is_zero() {
            return (Rational::zero(), Rational::zero());
        }
        // floor(sqrt(v * 4^bits)) / 2^bits bounds sqrt(v) from below.
        let scaled = &self.0 * BigRational::from_integer(BigInt::one() << (2 * bits));
        let floor = scaled.floor().to_integer();
        let root = num_integer::Roots::sqrt(&floor);
        let den = BigInt::one() << bits;
        let lo = Rational::new(root.clone(), den.clone());
        let hi = Rational::new(root + 1, den);
        debug_assert!(lo.square() <= *self && *self <= hi.square());
        (lo, hi)
    }

    /// A rational upper bound on `sqrt(self)` within `2^-bits`.
    pub fn sqrt_upper(&self, bits: u32) -> Rational {
        self.sqrt_bounds(bits).1
    }

    /// Exact test of `2^(self) < value` for `self >= 0` and `value > 0`.
    ///
    /// Raises both sides to the denominator of the exponent, so the cost is
    /// governed by that denominator.
    pub fn pow2_lt(&self, value: &Rational) -> bool {
        pow2_cmp(self, value) == std::cmp::Ordering::Less
    }

    /// Exact comparison of `2^(self)` with `value` for `value > 0`.
    pub fn pow2_cmp(&self, value: &Rational) -> std::cmp::Ordering {
        pow2_cmp(self, value)
    }
}

fn pow2_cmp(exp: &Rational, value: &Rational) -> std::cmp::Ordering {
    assert!(value.is_positive(), "comparison against a non-positive value");
    // 2^(p/q) ? a/b  <=>  2^p * b^q ? a^q  (q > 0); negative p moves to the other side.
    let p = exp.numer().clone();
    let q = exp.denom().to_u32().expect("exponent denominator too large");
    let a = value.numer().clone();
    let b = value.denom().clone();
    let aq = num_traits::pow(a, q as usize);
    let bq = num_traits::pow(b, q as usize);
    if p.is_negative() {
        let shift = (-p).to_usize().expect("exponent too large");
        // 2^-s * ... : compare bq ? aq * 2^s
        bq.cmp(&(aq << shift))
    } else {
        let shift = p.to_usize().expect("exponent too large");
        (bq << shift).cmp(&aq)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let parse_int = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| ParseRationalError::BadInteger(s.to_string()))
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let n = parse_int(n)?;
                let d = parse_int(d)?;
                if d.is_zero() {
                    return Err(ParseRationalError::ZeroDenominator(s.to_string()));
                }
                Ok(Rational(BigRational::new(n, d)))
            }
            None => Ok(Rational::from_int(parse_int(s)?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RationalVisitor;

        impl Visitor<'_> for RationalVisitor {
            type Value = Rational;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational string \"num/den\" or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from_int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational::from_int(v))
            }
        }

        deserializer.deserialize_any(RationalVisitor)
    }
}

macro_rules! from_int_impl {
    ($($t:ty),*) => {$(
        impl From<$t> for Rational {
            fn from(v: $t) -> Self {
                Rational::from_int(v)
            }
        }
    )*};
}
from_int_impl!(i32, i64, i128, u32, u64, usize);

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational::from_int(v)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(&self.0 / &rhs.0)
    }
}
impl Div<Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        &self / &rhs
    }
}
impl Div<&Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        &self / rhs
    }
}
impl Div<Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        self / &rhs
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}
impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}
impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}
impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}
impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        self.0 -= rhs.0;
    }
}
impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Shorthand used throughout tests and constructions.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_strings() {
        assert_eq!(rat(6, -14).to_string(), "-3/7");
        assert_eq!(rat(4, 2).to_string(), "2");
        assert_eq!("4/1".parse::<Rational>().unwrap().to_string(), "4");
        assert_eq!("-3/7".parse::<Rational>().unwrap(), rat(-3, 7));
        assert!(" 12 ".parse::<Rational>().is_ok());
    }

    #[test]
    fn parse_errors() {
        assert_eq!("".parse::<Rational>(), Err(ParseRationalError::Empty));
        assert!(matches!("1/0".parse::<Rational>(), Err(ParseRationalError::ZeroDenominator(_))));
        assert!(matches!("x/2".parse::<Rational>(), Err(ParseRationalError::BadInteger(_))));
        assert!(matches!("1.5".parse::<Rational>(), Err(ParseRationalError::BadInteger(_))));
    }

    #[test]
    fn serde_accepts_strings_and_integers() {
        let v: Vec<Rational> = serde_json::from_str(r#"["1/2", "3/1", 4, "-6/4"]"#).unwrap();
        assert_eq!(v, vec![rat(1, 2), rat(3, 1), rat(4, 1), rat(-3, 2)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["1/2","3","4","-3/2"]"#);
    }

    #[test]
    fn sqrt_bounds_bracket() {
        for (n, d) in [(2, 1), (1, 4), (10_000_001, 3), (1, 1_000_000_007)] {
            let v = rat(n, d);
            let (lo, hi) = v.sqrt_bounds(40);
            assert!(lo.square() <= v && v <= hi.square());
        }
        let (lo, hi) = rat(9, 4).sqrt_bounds(10);
        assert_eq!(lo, rat(3, 2));
        assert!(hi > lo);
    }

    #[test]
    fn pow2_comparisons() {
        // 2^(3/2) = 2.828...
        assert!(rat(3, 2).pow2_lt(&rat(29, 10)));
        assert!(!rat(3, 2).pow2_lt(&rat(28, 10)));
        // 2^1 == 2
        assert_eq!(Rational::one().pow2_cmp(&rat(2, 1)), std::cmp::Ordering::Equal);
        // 2^0 = 1 < any imbalance >= 2
        assert!(Rational::zero().pow2_lt(&rat(2, 1)));
        assert!(rat(-1, 1).pow2_lt(&rat(1, 1)));
    }
}
