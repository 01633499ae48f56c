//! Exact arbitrary-precision rationals, serialized as `"p/q"` strings.
//!
//! Everything in this crate computes over these; there is no floating
//! point anywhere on the certificate path.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational scalar. Wraps [`BigRational`], always kept in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new<N: Into<BigInt>, D: Into<BigInt>>(numer: N, denom: D) -> Self {
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn int<N: Into<BigInt>>(n: N) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Canonical representative in `[0, 1)`.
    pub fn mod1(&self) -> Self {
        Rational(&self.0 - BigRational::from_integer(self.0.floor().to_integer()))
    }

    /// Distance to the nearest integer (the torus metric on one coordinate).
    pub fn dist_to_int(&self) -> Self {
        let frac = self.mod1();
        let complement = Rational::one() - frac.clone();
        if frac <= complement {
            frac
        } else {
            complement
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::int(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::int(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

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

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        self.0 -= rhs.0;
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

impl FromStr for Rational {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let numer: BigInt = n.trim().parse().map_err(|e| format!("bad numerator: {e}"))?;
        let denom: BigInt = d.trim().parse().map_err(|e| format!("bad denominator: {e}"))?;
        if denom.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Shorthand used pervasively in tests.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["1/2", "-3/7", "0", "5", "-2"] {
            let r: Rational = s.parse().unwrap();
            let back: Rational = r.to_string().parse().unwrap();
            assert_eq!(r, back);
        }
    }

    #[test]
    fn reduces_to_lowest_terms() {
        assert_eq!(rat(2, 4), rat(1, 2));
        assert_eq!(rat(-6, -4), rat(3, 2));
    }

    #[test]
    fn mod1_canonicalizes() {
        assert_eq!(rat(5, 2).mod1(), rat(1, 2));
        assert_eq!(rat(-1, 3).mod1(), rat(2, 3));
        assert_eq!(Rational::int(7).mod1(), Rational::zero());
    }

    #[test]
    fn torus_distance() {
        assert_eq!(rat(1, 15).dist_to_int(), rat(1, 15));
        assert_eq!(rat(14, 15).dist_to_int(), rat(1, 15));
        assert_eq!(rat(1, 2).dist_to_int(), rat(1, 2));
    }
}
