use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::dyadic::Dyadic;
use super::parse::{parse_number, ParseError};

/// An exact element `(p + q·√2) / 2^exp` of ℚ(√2) with a dyadic denominator.
///
/// Always kept in canonical form: `exp` is minimal, so `p` and `q` are not
/// both even unless the value is zero, in which case `exp = 0`. Structural
/// equality is therefore value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Quad {
    p: BigInt,
    q: BigInt,
    exp: u32,
}

fn trailing_zeros(x: &BigInt) -> Option<u64> {
    x.trailing_zeros()
}

impl Quad {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>, exp: u32) -> Self {
        Self::canonical(p.into(), q.into(), exp)
    }

    fn canonical(mut p: BigInt, mut q: BigInt, mut exp: u32) -> Self {
        if p.is_zero() && q.is_zero() {
            return Quad {
                p,
                q,
                exp: 0,
            };
        }
        let tz = match (trailing_zeros(&p), trailing_zeros(&q)) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!(),
        };
        let shift = tz.min(exp as u64) as u32;
        if shift > 0 {
            p >>= shift;
            q >>= shift;
            exp -= shift;
        }
        Quad { p, q, exp }
    }

    pub fn zero() -> Self {
        Quad::new(0, 0, 0)
    }

    pub fn one() -> Self {
        Quad::new(1, 0, 0)
    }

    pub fn sqrt2() -> Self {
        Quad::new(0, 1, 0)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Quad::new(n, 0, 0)
    }

    /// `num / 2^exp`.
    pub fn dyadic(num: impl Into<BigInt>, exp: u32) -> Self {
        Quad::new(num, 0, exp)
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.q.is_zero() && self.exp == 0
    }

    pub fn to_dyadic(&self) -> Option<Dyadic> {
        self.is_rational().then(|| Dyadic::new(self.p.clone(), self.exp))
    }

    /// Sign of `p + q·√2` using integer arithmetic only.
    pub fn signum(&self) -> i8 {
        let sp = sign_of(&self.p);
        let sq = sign_of(&self.q);
        if sp == sq || sq == 0 {
            return sp;
        }
        if sp == 0 {
            return sq;
        }
        // mixed signs: the dominant term decides
        let p2 = &self.p * &self.p;
        let q2 = &self.q * &self.q * 2;
        match p2.cmp(&q2) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => unreachable!("sqrt(2) is irrational"),
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Quad {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplies by `2^k` (negative `k` divides).
    pub fn scale_pow2(&self, k: i64) -> Quad {
        if k >= 0 {
            let k = k as u64;
            let drop = k.min(self.exp as u64);
            let lift = k - drop;
            Quad::canonical(
                &self.p << lift,
                &self.q << lift,
                self.exp - drop as u32,
            )
        } else {
            let add = u32::try_from(-k).expect("exponent overflow");
            Quad::canonical(self.p.clone(), self.q.clone(), self.exp + add)
        }
    }

    pub fn half(&self) -> Quad {
        self.scale_pow2(-1)
    }

    /// Galois conjugate `p − q·√2`.
    pub fn conj(&self) -> Quad {
        Quad::canonical(self.p.clone(), -&self.q, self.exp)
    }

    /// Exact floor, found via the integer square root of `2q²`.
    pub fn floor(&self) -> BigInt {
        let two_q2: BigInt = &self.q * &self.q * 2;
        let s = two_q2.sqrt();
        // s ≤ √(2q²) < s + 1, with equality only when q = 0
        let int_floor = match self.q.sign() {
            Sign::NoSign => self.p.clone(),
            Sign::Plus => &self.p + &s,
            Sign::Minus => &self.p - &s - 1,
        };
        debug_assert!({
            let lo = Quad::from_int(int_floor.clone());
            let whole = Quad::new(self.p.clone(), self.q.clone(), 0);
            lo <= whole && whole < lo + Quad::one()
        });
        int_floor.div_floor(&(BigInt::one() << self.exp))
    }

    /// `self − ⌊self⌋`, always in `[0, 1)`.
    pub fn frac(&self) -> Quad {
        self - &Quad::from_int(self.floor())
    }

    /// Distance to the nearest integer, i.e. the circle metric to 0 on ℝ/ℤ.
    pub fn circle_dist_to_zero(&self) -> Quad {
        let f = self.frac();
        let other = Quad::one() - &f;
        if other < f {
            other
        } else {
            f
        }
    }

    /// Exact quotient when it stays inside the dyadic ℚ(√2) lattice.
    pub fn checked_div(&self, d: &Quad) -> Option<Quad> {
        if d.is_zero() {
            return None;
        }
        // a / d = a · conj(d) · 4^e_d / (p_d² − 2q_d²)
        let norm: BigInt = &d.p * &d.p - &d.q * &d.q * 2;
        let scaled = (self * &d.conj()).scale_pow2(2 * d.exp as i64);
        let tz = norm.trailing_zeros().unwrap_or(0);
        let odd = &norm >> tz;
        let (pq, pr) = scaled.p.div_rem(&odd);
        let (qq, qr) = scaled.q.div_rem(&odd);
        if !pr.is_zero() || !qr.is_zero() {
            return None;
        }
        let tz = u32::try_from(tz).ok()?;
        Some(Quad::canonical(pq, qq, scaled.exp + tz))
    }

    pub fn min<'a>(&'a self, other: &'a Quad) -> &'a Quad {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max<'a>(&'a self, other: &'a Quad) -> &'a Quad {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Display-only decimal approximation.
    pub fn to_f64(&self) -> f64 {
        let scale = 2f64.powi(-(self.exp.min(2000) as i32));
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        let q = self.q.to_f64().unwrap_or(f64::NAN);
        (p + q * std::f64::consts::SQRT_2) * scale
    }
}

fn sign_of(x: &BigInt) -> i8 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl Default for Quad {
    fn default() -> Self {
        Quad::zero()
    }
}

impl From<i64> for Quad {
    fn from(n: i64) -> Self {
        Quad::from_int(n)
    }
}

impl From<&Dyadic> for Quad {
    fn from(d: &Dyadic) -> Self {
        Quad::new(d.numerator().clone(), 0, d.exponent())
    }
}

impl From<Dyadic> for Quad {
    fn from(d: Dyadic) -> Self {
        Quad::from(&d)
    }
}

fn align(a: &Quad, b: &Quad) -> (BigInt, BigInt, BigInt, BigInt, u32) {
    let e = a.exp.max(b.exp);
    let sa = e - a.exp;
    let sb = e - b.exp;
    (&a.p << sa, &a.q << sa, &b.p << sb, &b.q << sb, e)
}

impl Add<&Quad> for &Quad {
    type Output = Quad;
    fn add(self, rhs: &Quad) -> Quad {
        let (ap, aq, bp, bq, e) = align(self, rhs);
        Quad::canonical(ap + bp, aq + bq, e)
    }
}

impl Sub<&Quad> for &Quad {
    type Output = Quad;
    fn sub(self, rhs: &Quad) -> Quad {
        let (ap, aq, bp, bq, e) = align(self, rhs);
        Quad::canonical(ap - bp, aq - bq, e)
    }
}

impl Mul<&Quad> for &Quad {
    type Output = Quad;
    fn mul(self, rhs: &Quad) -> Quad {
        let p = &self.p * &rhs.p + &self.q * &rhs.q * 2;
        let q = &self.p * &rhs.q + &self.q * &rhs.p;
        Quad::canonical(p, q, self.exp + rhs.exp)
    }
}

impl Neg for &Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        Quad {
            p: -&self.p,
            q: -&self.q,
            exp: self.exp,
        }
    }
}

impl Neg for Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $f:ident) => {
        impl $tr<Quad> for Quad {
            type Output = Quad;
            fn $f(self, rhs: Quad) -> Quad {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Quad> for Quad {
            type Output = Quad;
            fn $f(self, rhs: &Quad) -> Quad {
                (&self).$f(rhs)
            }
        }
        impl $tr<Quad> for &Quad {
            type Output = Quad;
            fn $f(self, rhs: Quad) -> Quad {
                self.$f(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Ord for Quad {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        (self - other).signum().cmp(&0)
    }
}

impl PartialOrd for Quad {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, num: &BigInt, exp: u32) -> fmt::Result {
    if exp == 0 {
        write!(f, "{num}")
    } else {
        write!(f, "{num}/{}", BigInt::one() << exp)
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            return write_rational(f, &self.p, self.exp);
        }
        let op = if self.q.is_negative() { '-' } else { '+' };
        write!(f, "({} {} {}*sqrt2)", self.p, op, self.q.abs())?;
        if self.exp > 0 {
            write!(f, "/2^{}", self.exp)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quad({self})")
    }
}

impl FromStr for Quad {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_number(s)
    }
}

impl Serialize for Quad {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Quad {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Quad {
        s.parse().unwrap()
    }

    #[test]
    fn ring_examples() {
        assert_eq!(q("1/2") + q("1/2"), Quad::one());
        assert_eq!(Quad::sqrt2() * Quad::sqrt2(), Quad::from_int(2));
        let breakpoint = Quad::from_int(2) - Quad::sqrt2();
        assert_eq!(breakpoint - Quad::from_int(2), -Quad::sqrt2());
    }

    #[test]
    fn sign_examples() {
        assert_eq!(Quad::new(3, -2, 0).signum(), 1);
        assert_eq!(Quad::zero().signum(), 0);
        let a = Quad::sqrt2() - Quad::one() - q("1/2");
        assert_eq!(a.signum(), -1);
        assert_eq!(Quad::new(-3, 2, 0).signum(), -1);
        assert_eq!(Quad::new(-1, 1, 0).signum(), 1);
    }

    #[test]
    fn canonical_form() {
        let a = Quad::new(4, 8, 3);
        assert_eq!((a.p(), a.q(), a.exponent()), (&BigInt::from(1), &BigInt::from(2), 1));
        let z = Quad::new(0, 0, 9);
        assert_eq!(z.exponent(), 0);
        assert_eq!(Quad::new(6, 0, 1), Quad::from_int(3));
    }

    #[test]
    fn floor_and_frac() {
        assert_eq!(q("3/4").frac(), q("3/4"));
        let r = Quad::new(-2, 2, 0);
        assert_eq!(r.frac(), r);
        // isqrt(18) = 4
        assert_eq!(Quad::new(0, 3, 0).frac(), Quad::new(-4, 3, 0));
        assert_eq!(Quad::new(0, -3, 0).floor(), BigInt::from(-5));
        assert_eq!(q("-1/2").floor(), BigInt::from(-1));
        assert_eq!(q("-1").frac(), Quad::zero());
        assert_eq!(Quad::new(1, 1, 1).floor(), BigInt::from(1));
    }

    #[test]
    fn division_within_lattice() {
        let s = Quad::sqrt2();
        assert_eq!(Quad::one().checked_div(&s), Some(Quad::new(0, 1, 1)));
        assert_eq!(Quad::one().checked_div(&Quad::from_int(3)), None);
        let a = Quad::new(5, -7, 3);
        let d = Quad::new(1, 1, 0); // unit: norm -1
        let quo = a.checked_div(&d).unwrap();
        assert_eq!(quo * d, a);
        assert_eq!(a.checked_div(&Quad::zero()), None);
    }

    #[test]
    fn circle_distance() {
        let kappa = Quad::sqrt2() - Quad::one();
        assert_eq!(kappa.circle_dist_to_zero(), kappa);
        let two = kappa.clone() + kappa;
        assert_eq!(two.circle_dist_to_zero(), Quad::new(3, -2, 0));
    }
}
