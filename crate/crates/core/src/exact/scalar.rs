use std::fmt;

use num_bigint::BigInt;

use super::{Quad, Surd};

/// The exact ordered-ring operations map evaluation needs.
///
/// Implemented by the dyadic [`Quad`] and by the general [`Surd`].
pub trait Scalar: Clone + Ord + fmt::Display + fmt::Debug {
    fn from_quad(x: &Quad) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn floor(&self) -> BigInt;

    fn from_int(n: BigInt) -> Self {
        Self::from_quad(&Quad::from_int(n))
    }

    fn frac(&self) -> Self {
        self.minus(&Self::from_int(self.floor()))
    }

    fn is_negative(&self) -> bool {
        *self < Self::from_quad(&Quad::zero())
    }
}

impl Scalar for Quad {
    fn from_quad(x: &Quad) -> Self {
        x.clone()
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }

    fn minus(&self, other: &Self) -> Self {
        self - other
    }

    fn times(&self, other: &Self) -> Self {
        self * other
    }

    fn floor(&self) -> BigInt {
        Quad::floor(self)
    }

    fn frac(&self) -> Self {
        Quad::frac(self)
    }

    fn is_negative(&self) -> bool {
        Quad::is_negative(self)
    }
}

impl Scalar for Surd {
    fn from_quad(x: &Quad) -> Self {
        Surd::from(x)
    }

    fn plus(&self, other: &Self) -> Self {
        Surd::plus(self, other)
    }

    fn minus(&self, other: &Self) -> Self {
        Surd::minus(self, other)
    }

    fn times(&self, other: &Self) -> Self {
        Surd::times(self, other)
    }

    fn floor(&self) -> BigInt {
        Surd::floor(self)
    }
}
