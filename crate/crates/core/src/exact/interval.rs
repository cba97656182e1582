use std::fmt;

use serde::{Deserialize, Serialize};

use super::Quad;
use crate::error::{Error, Result};

/// A closed target interval `[lo, hi] ⊆ [0, 1]`; `lo = hi` is a point.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct IntervalSpec {
    lo: Quad,
    hi: Quad,
}

#[derive(Deserialize)]
struct RawInterval {
    lo: Quad,
    hi: Quad,
}

impl TryFrom<RawInterval> for IntervalSpec {
    type Error = Error;
    fn try_from(raw: RawInterval) -> Result<Self> {
        IntervalSpec::new(raw.lo, raw.hi)
    }
}

impl IntervalSpec {
    pub fn new(lo: Quad, hi: Quad) -> Result<Self> {
        if lo > hi {
            return Err(Error::Validation(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        if lo.is_negative() || hi > Quad::one() {
            return Err(Error::Validation(format!("interval [{lo}, {hi}] leaves [0, 1]")));
        }
        Ok(IntervalSpec { lo, hi })
    }

    pub fn point(x: Quad) -> Result<Self> {
        IntervalSpec::new(x.clone(), x)
    }

    /// `[center − radius, center + radius]`.
    pub fn from_center_radius(center: &Quad, radius: &Quad) -> Result<Self> {
        IntervalSpec::new(center - radius, center + radius)
    }

    pub fn full() -> Self {
        IntervalSpec {
            lo: Quad::zero(),
            hi: Quad::one(),
        }
    }

    pub fn lo(&self) -> &Quad {
        &self.lo
    }

    pub fn hi(&self) -> &Quad {
        &self.hi
    }

    pub fn center(&self) -> Quad {
        (&self.lo + &self.hi).half()
    }

    pub fn radius(&self) -> Quad {
        (&self.hi - &self.lo).half()
    }

    pub fn length(&self) -> Quad {
        &self.hi - &self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    /// Closed membership, endpoints included.
    pub fn contains(&self, x: &Quad) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &IntervalSpec) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Reflection `x ↦ 1 − x`.
    pub fn mirror(&self) -> IntervalSpec {
        let one = Quad::one();
        IntervalSpec {
            lo: &one - &self.hi,
            hi: &one - &self.lo,
        }
    }
}

impl fmt::Display for IntervalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Debug for IntervalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntervalSpec{self}")
    }
}
