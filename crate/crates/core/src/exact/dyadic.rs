use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::parse::{parse_number, ParseError, ParseErrorKind};
use super::Quad;

/// An exact dyadic rational `numerator / 2^exponent`.
///
/// Canonical: the numerator is odd, or the value is zero with exponent 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u32) -> Self {
        let mut num = num.into();
        if num.is_zero() {
            return Dyadic { num, exp: 0 };
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(exp as u64) as u32;
        num >>= tz;
        Dyadic { num, exp: exp - tz }
    }

    pub fn zero() -> Self {
        Dyadic::new(0, 0)
    }

    pub fn one() -> Self {
        Dyadic::new(1, 0)
    }

    /// The grid point `index / 2^precision`.
    pub fn grid_point(index: u64, precision: u32) -> Self {
        Dyadic::new(index, precision)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn to_quad(&self) -> Quad {
        Quad::from(self)
    }

    pub fn is_negative(&self) -> bool {
        self.num < BigInt::zero()
    }

    pub fn abs(&self) -> Dyadic {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Index of this point on the grid `I_r`, if it lies on it.
    pub fn grid_index(&self, precision: u32) -> Option<u64> {
        if self.exp > precision || self.is_negative() {
            return None;
        }
        let idx: BigInt = &self.num << (precision - self.exp);
        let idx = u64::try_from(idx).ok()?;
        (precision >= 64 || idx < (1u64 << precision)).then_some(idx)
    }
}

fn align(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, u32) {
    let e = a.exp.max(b.exp);
    (&a.num << (e - a.exp), &b.num << (e - b.exp), e)
}

impl Add<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = align(self, rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = align(self, rhs);
        Dyadic::new(a - b, e)
    }
}

impl Mul<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -&self.num,
            exp: self.exp,
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = align(self, other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, BigInt::one() << self.exp)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

impl FromStr for Dyadic {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let q = parse_number(s)?;
        q.to_dyadic().ok_or_else(|| ParseError {
            input: s.to_string(),
            token: "sqrt2".to_string(),
            kind: ParseErrorKind::Irrational,
        })
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
