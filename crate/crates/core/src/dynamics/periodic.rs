use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{MapSpec, Piece};
use crate::error::{Error, Result};
use crate::exact::{Quad, Surd};

/// Solutions of `m^n(x) = x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeriodicPoints {
    /// Every point is periodic (the identity map).
    All,
    Finite(Vec<Surd>),
}

impl PeriodicPoints {
    pub fn contains(&self, x: &Surd) -> bool {
        match self {
            PeriodicPoints::All => true,
            PeriodicPoints::Finite(v) => v.binary_search(x).is_ok(),
        }
    }

    pub fn len(&self) -> Option<usize> {
        match self {
            PeriodicPoints::All => None,
            PeriodicPoints::Finite(v) => Some(v.len()),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, PeriodicPoints::Finite(v) if v.is_empty())
    }
}

/// An itinerary prefix: the composed affine map `x ↦ a·x + b` and a closed
/// interval containing the image of its cylinder.
struct Branchset {
    a: Surd,
    b: Surd,
    lo: Surd,
    hi: Surd,
}

/// All points of period `n` (not necessarily least period), ascending.
///
/// Length-`n` itineraries are enumerated with their cylinder images tracked
/// as closed intervals, each affine fixed-point equation is solved exactly,
/// and every candidate is confirmed by iterating the map.
pub fn periodic_points(m: &MapSpec, n: u32) -> Result<PeriodicPoints> {
    if n == 0 {
        return Err(Error::Validation("period must be at least 1".into()));
    }
    match m {
        MapSpec::Identity => return Ok(PeriodicPoints::All),
        // x² = x only at the endpoints of the closed interval
        MapSpec::Squaring => {
            return Ok(PeriodicPoints::Finite(vec![
                Surd::from(Quad::zero()),
                Surd::from(Quad::one()),
            ]))
        }
        _ => {}
    }
    let (pieces, mod1) = m
        .affine_pieces()
        .ok_or_else(|| Error::Unsupported(format!("periodic points of {m}")))?;

    let zero = Surd::from(Quad::zero());
    let one = Surd::from(Quad::one());
    let mut frontier = vec![Branchset {
        a: one.clone(),
        b: zero.clone(),
        lo: zero,
        hi: one.clone(),
    }];
    for _ in 0..n {
        let mut next = Vec::new();
        for set in &frontier {
            for pc in &pieces {
                extend(set, pc, mod1, &mut next);
            }
        }
        frontier = next;
    }

    let mut found = BTreeSet::new();
    for set in frontier {
        let candidate = if set.a == one {
            if !set.b.is_zero() {
                continue;
            }
            if set.lo != set.hi {
                return Err(Error::Unsupported(format!(
                    "{m} has a continuum of period-{n} points"
                )));
            }
            set.lo.clone()
        } else {
            set.b
                .checked_div(&one.minus(&set.a))
                .expect("nonzero denominator")
        };
        if m.check_domain(&candidate).is_err() {
            continue;
        }
        if m.eval_n(&candidate, n as u64)? == candidate {
            found.insert(candidate);
        }
    }
    Ok(PeriodicPoints::Finite(found.into_iter().collect()))
}

fn extend(set: &Branchset, pc: &Piece, mod1: bool, out: &mut Vec<Branchset>) {
    let lo = set.lo.clone().max(Surd::from(&pc.lo));
    let hi = set.hi.clone().min(Surd::from(&pc.hi));
    if lo > hi {
        return;
    }
    let slope = Surd::from(&pc.branch.slope);
    let offset = Surd::from(&pc.branch.offset);
    let a = slope.times(&set.a);
    let b = slope.times(&set.b).plus(&offset);
    let u = slope.times(&lo).plus(&offset);
    let v = slope.times(&hi).plus(&offset);
    let (ilo, ihi) = if u <= v { (u, v) } else { (v, u) };
    if !mod1 {
        out.push(Branchset { a, b, lo: ilo, hi: ihi });
        return;
    }
    let last: BigInt = ihi.floor();
    let mut j: BigInt = ilo.floor();
    while j <= last {
        let shift = Surd::from(Quad::from_int(j.clone()));
        let top = shift.plus(&Surd::from(Quad::one()));
        let wlo = ilo.clone().max(shift.clone()).minus(&shift);
        let whi = ihi.clone().min(top).minus(&shift);
        if wlo <= whi {
            out.push(Branchset {
                a: a.clone(),
                b: b.minus(&shift),
                lo: wlo,
                hi: whi,
            });
        }
        j += 1;
    }
}
