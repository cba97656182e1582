use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::parse::{parse_number, ParseError};
use super::Quad;

/// An element `(p + q·√2) / d` of ℚ(√2) with any positive denominator.
///
/// Dyadic [`Quad`] values cover all certificates and orbits of grid points;
/// this wider type holds the rationals with odd denominators that appear as
/// periodic points (e.g. `2/3` for the tent map). Canonical: `gcd(p, q, d) = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Surd {
    p: BigInt,
    q: BigInt,
    d: BigInt,
}

impl Surd {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        let (mut p, mut q, mut d) = (p.into(), q.into(), d.into());
        assert!(!d.is_zero(), "zero denominator");
        if d.is_negative() {
            p = -p;
            q = -q;
            d = -d;
        }
        let g = p.gcd(&q).gcd(&d);
        if !g.is_one() && !g.is_zero() {
            p /= &g;
            q /= &g;
            d /= &g;
        }
        if p.is_zero() && q.is_zero() {
            d = BigInt::one();
        }
        Surd { p, q, d }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn denominator(&self) -> &BigInt {
        &self.d
    }

    pub fn signum(&self) -> i8 {
        Quad::new(self.p.clone(), self.q.clone(), 0).signum()
    }

    pub fn floor(&self) -> BigInt {
        // ⌊x/d⌋ = ⌊⌊x⌋/d⌋ for positive integers d
        let whole = Quad::new(self.p.clone(), self.q.clone(), 0).floor();
        whole.div_floor(&self.d)
    }

    /// The same value as a dyadic [`Quad`], when the denominator is a power of two.
    pub fn to_quad(&self) -> Option<Quad> {
        let tz = self.d.trailing_zeros().unwrap_or(0);
        if self.d != (BigInt::one() << tz) {
            return None;
        }
        Some(Quad::new(self.p.clone(), self.q.clone(), u32::try_from(tz).ok()?))
    }

    pub fn checked_div(&self, other: &Surd) -> Option<Surd> {
        if other.is_zero() {
            return None;
        }
        // (p + q√2)/d ÷ (p' + q'√2)/d' = (p + q√2)(p' − q'√2)·d' / (d·N')
        let norm: BigInt = &other.p * &other.p - &other.q * &other.q * 2;
        let p = (&self.p * &other.p - &self.q * &other.q * 2) * &other.d;
        let q = (&self.q * &other.p - &self.p * &other.q) * &other.d;
        Some(Surd::new(p, q, &self.d * norm))
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        Quad::new(self.p.clone(), self.q.clone(), 0).to_f64() / num_traits::ToPrimitive::to_f64(&self.d).unwrap_or(f64::NAN)
    }

    pub(crate) fn plus(&self, o: &Surd) -> Surd {
        Surd::new(
            &self.p * &o.d + &o.p * &self.d,
            &self.q * &o.d + &o.q * &self.d,
            &self.d * &o.d,
        )
    }

    pub(crate) fn minus(&self, o: &Surd) -> Surd {
        Surd::new(
            &self.p * &o.d - &o.p * &self.d,
            &self.q * &o.d - &o.q * &self.d,
            &self.d * &o.d,
        )
    }

    pub(crate) fn times(&self, o: &Surd) -> Surd {
        Surd::new(
            &self.p * &o.p + &self.q * &o.q * 2,
            &self.p * &o.q + &self.q * &o.p,
            &self.d * &o.d,
        )
    }
}

impl From<&Quad> for Surd {
    fn from(x: &Quad) -> Self {
        Surd::new(x.p().clone(), x.q().clone(), BigInt::one() << x.exponent())
    }
}

impl From<Quad> for Surd {
    fn from(x: Quad) -> Self {
        Surd::from(&x)
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.minus(other).signum().cmp(&0)
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(x) = self.to_quad() {
            return write!(f, "{x}");
        }
        if self.q.is_zero() {
            return write!(f, "{}/{}", self.p, self.d);
        }
        let op = if self.q.sign() == Sign::Minus { '-' } else { '+' };
        write!(f, "({} {} {}*sqrt2)/{}", self.p, op, self.q.abs(), self.d)
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Surd({self})")
    }
}

impl Serialize for Surd {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for Surd {
    type Err = ParseError;

    /// Accepts the dyadic number grammar, or `<numerator>/<odd integer>`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let first = match parse_number(text) {
            Ok(x) => return Ok(Surd::from(x)),
            Err(e) => e,
        };
        let Some((num, den)) = text.rsplit_once('/') else {
            return Err(first);
        };
        let den: BigInt = match den.trim().parse() {
            Ok(d) if d > BigInt::zero() => d,
            _ => return Err(first),
        };
        let num = parse_number(num).map_err(|_| first)?;
        let scale = BigInt::one() << num.exponent();
        Ok(Surd::new(num.p().clone(), num.q().clone(), den * scale))
    }
}

impl<'de> Deserialize<'de> for Surd {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
