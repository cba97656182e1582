use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::dynamics::{grid_images, image_of_grid, MapSpec};
use crate::error::{Error, Result};
use crate::exact::{Dyadic, Quad};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallPreimageReport {
    pub n: u32,
    pub k: u32,
    pub points: u64,
    pub injective: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colliding_pair: Option<(Dyadic, Dyadic)>,
}

/// Is `s ↦ frac(2^k·g(s))` injective on `I_n`? Decided by sorting the exact
/// values and comparing neighbours.
pub fn check_small_preimage(n: u32, k: u32, homeo: &MapSpec, budget: &Budget) -> Result<SmallPreimageReport> {
    budget.check_grid(n, "small-preimage scan")?;
    let values = grid_images(&MapSpec::Doubling, homeo, u64::from(k), n)?;
    let mut order: Vec<(Quad, u64)> = values.into_iter().zip(0u64..).collect();
    order.sort();
    let colliding_pair = order
        .windows(2)
        .filter(|w| w[0].0 == w[1].0)
        .map(|w| (w[0].1, w[1].1))
        .min()
        .map(|(a, b)| (Dyadic::grid_point(a, n), Dyadic::grid_point(b, n)));
    Ok(SmallPreimageReport {
        n,
        k,
        points: order.len() as u64,
        injective: colliding_pair.is_none(),
        colliding_pair,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbReport {
    pub n: u32,
    pub m: u32,
    pub s: Dyadic,
    /// `E₂ⁿ(g(s))`.
    pub c1: Quad,
    /// A value next to `c1` that no grid point reaches.
    pub c2: Quad,
    /// The image value closest to `c1` among grid points at distance ≥ 1/3 from `s`.
    pub c3: Quad,
    pub s_prime: Dyadic,
    /// `|c1 − c3|`.
    pub separation: Quad,
    /// `|c1 − c2|`.
    pub gap: Quad,
}

/// Targets that move by a tiny amount while their solutions move far, on
/// the grid `I_{n^m}` under `E₂ⁿ ∘ g`.
pub fn perturb_witness(n: u32, m: u32, s: &Dyadic, homeo: &MapSpec, budget: &Budget) -> Result<PerturbReport> {
    let r = n
        .checked_pow(m)
        .filter(|&r| r < 64)
        .ok_or_else(|| Error::Resource(format!("grid I_{n}^{m} is too large")))?;
    budget.check_grid(r, "perturbation scan")?;
    let idx = s
        .grid_index(r)
        .ok_or_else(|| Error::Validation(format!("{s} is not a point of I_{r}")))?;
    let values = grid_images(&MapSpec::Doubling, homeo, u64::from(n), r)?;
    let c1 = values[idx as usize].clone();

    let s_q = s.to_quad();
    let third_of = Quad::from_int(3);
    let mut best: Option<(Quad, u64)> = None;
    for (k, v) in values.iter().enumerate() {
        let k = k as u64;
        let far = &third_of * &(&Quad::dyadic(k, r) - &s_q).abs() >= Quad::one();
        if !far || *v == c1 {
            continue;
        }
        let d = (v - &c1).abs();
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, k));
        }
    }
    let (separation, k3) = best.ok_or_else(|| {
        Error::Range(format!("no grid point at distance 1/3 from {s} has a new image"))
    })?;
    let c3 = values[k3 as usize].clone();

    let mut distinct = values;
    distinct.sort();
    distinct.dedup();
    let pos = distinct.binary_search(&c1).expect("c1 is an image value");
    let c2 = match distinct.get(pos + 1) {
        Some(next) => (&c1 + next).half(),
        None if pos > 0 => (&c1 + &distinct[pos - 1]).half(),
        None => (&c1 + &Quad::one()).half(),
    };
    let gap = (&c2 - &c1).abs();
    Ok(PerturbReport {
        n,
        m,
        s: s.clone(),
        c1,
        c2,
        c3,
        s_prime: Dyadic::grid_point(k3, r),
        separation,
        gap,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapReport {
    pub n: u32,
    pub card_from: u64,
    pub card_to: u64,
    pub gap: bool,
}

/// Distinct image counts of `I_{n²}` under `n` iterates of both pairs.
pub fn cardinality_gap(from: (&MapSpec, &MapSpec), to: (&MapSpec, &MapSpec), n: u32, budget: &Budget) -> Result<GapReport> {
    let r = n * n;
    let a = image_of_grid(from.0, from.1, u64::from(n), r, budget)?;
    let b = image_of_grid(to.0, to.1, u64::from(n), r, budget)?;
    Ok(GapReport {
        n,
        card_from: a.cardinality,
        card_to: b.cardinality,
        gap: a.cardinality < b.cardinality,
    })
}

/// Two grid points that `from` identifies and `to` separates.
///
/// Grids are scanned from the coarsest precision up, skipping the origin;
/// within a precision the lexicographically first pair is returned.
pub fn level1_witness(from: &MapSpec, to: &MapSpec, r: u32, budget: &Budget) -> Result<Option<(Dyadic, Dyadic)>> {
    budget.check_grid(r, "level-1 witness scan")?;
    for level in 1..=r {
        let fv = grid_images(from, &MapSpec::Identity, 1, level)?;
        let tv = grid_images(to, &MapSpec::Identity, 1, level)?;
        let mut groups: BTreeMap<&Quad, Vec<usize>> = BTreeMap::new();
        for (k, v) in fv.iter().enumerate().skip(1) {
            groups.entry(v).or_default().push(k);
        }
        let mut best: Option<(usize, usize)> = None;
        for members in groups.values() {
            for (i, &a) in members.iter().enumerate() {
                if let Some(&b) = members[i + 1..].iter().find(|&&b| tv[a] != tv[b]) {
                    best = Some(best.map_or((a, b), |prev| prev.min((a, b))));
                    break;
                }
            }
        }
        if let Some((a, b)) = best {
            return Ok(Some((
                Dyadic::grid_point(a as u64, level),
                Dyadic::grid_point(b as u64, level),
            )));
        }
    }
    Ok(None)
}
