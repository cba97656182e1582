use std::collections::BTreeSet;

use num_bigint::BigInt;

use super::MapSpec;
use crate::error::{Error, Result};
use crate::exact::Quad;

/// Exact dyadic square root of a non-negative dyadic rational, if it exists.
pub(crate) fn exact_sqrt(y: &Quad) -> Option<Quad> {
    if !y.is_rational() || y.is_negative() {
        return None;
    }
    let num = y.p();
    let mut exp = y.exponent();
    let mut num = num.clone();
    if exp % 2 == 1 {
        num <<= 1;
        exp += 1;
    }
    let root = num.sqrt();
    (&root * &root == num).then(|| Quad::dyadic(root, exp / 2))
}

/// All `x` with `m^n(x) = y`, ascending.
///
/// Piecewise-affine kinds are back-solved branch by branch; every candidate
/// is re-checked by forward evaluation before it is kept.
pub fn preimages(m: &MapSpec, y: &Quad, n: u32) -> Result<Vec<Quad>> {
    m.check_domain(y)?;
    let mut level: BTreeSet<Quad> = BTreeSet::from([y.clone()]);
    match m {
        MapSpec::Identity => {}
        MapSpec::Rotation { kappa } => {
            let back = (y - &(kappa * &Quad::from_int(n))).frac();
            level = BTreeSet::from([back]);
        }
        MapSpec::Doubling => {
            let count = 1u64
                .checked_shl(n)
                .filter(|_| n < 63)
                .ok_or_else(|| Error::Resource(format!("2^{n} preimages")))?;
            let scale = -i64::from(n);
            level = (0..count)
                .map(|k| (y + &Quad::from_int(k)).scale_pow2(scale))
                .collect();
        }
        MapSpec::Squaring => {
            for _ in 0..n {
                let root = level
                    .iter()
                    .next()
                    .and_then(exact_sqrt)
                    .ok_or_else(|| {
                        Error::Unsupported(format!("{y} has no exact 2^{n}-th root"))
                    })?;
                level = BTreeSet::from([root]);
            }
        }
        _ => {
            for _ in 0..n {
                let mut next = BTreeSet::new();
                for target in &level {
                    next.extend(one_step(m, target)?);
                }
                level = next;
            }
        }
    }
    Ok(level.into_iter().collect())
}

fn one_step(m: &MapSpec, y: &Quad) -> Result<Vec<Quad>> {
    let (pieces, mod1) = m.affine_pieces().expect("affine kind");
    let mut out = Vec::new();
    for pc in &pieces {
        let targets: Vec<Quad> = if mod1 {
            let a = pc.branch.apply(&pc.lo);
            let b = pc.branch.apply(&pc.hi);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let first: BigInt = (&lo - y).floor();
            let last: BigInt = (&hi - y).floor();
            let mut ts = Vec::new();
            let mut j = first;
            while j <= last {
                ts.push(y + &Quad::from_int(j.clone()));
                j += 1;
            }
            ts
        } else {
            vec![y.clone()]
        };
        for t in targets {
            let x = (&t - &pc.branch.offset)
                .checked_div(&pc.branch.slope)
                .ok_or_else(|| {
                    Error::Unsupported(format!("preimage of {y} under {m} leaves the lattice"))
                })?;
            if x < pc.lo || x > pc.hi || m.check_domain(&x).is_err() {
                continue;
            }
            if m.eval(&x)? == *y {
                out.push(x);
            }
        }
    }
    Ok(out)
}
