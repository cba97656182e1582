//! Brute-force certificate search and the order-based binary-search solver.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::dynamics::MapSpec;
use crate::error::{Error, Result};
use crate::exact::{Dyadic, Quad};
use crate::telic::TelicInstance;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub decision: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Dyadic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_count: Option<u64>,
    /// Orbit evaluations charged to the solver.
    pub evals: u64,
}

fn grid_count(inst: &TelicInstance, budget: &Budget) -> Result<u64> {
    budget.check_grid(inst.grid_precision, "certificate enumeration")?;
    inst.grid_size()
        .ok_or_else(|| Error::Resource(format!("grid I_{} is too large", inst.grid_precision)))
}

/// The smallest witness on the grid, or none. `evals` counts the grid points
/// up to and including the witness.
pub fn solve_brute(inst: &TelicInstance, budget: &Budget) -> Result<SolveReport> {
    let count = grid_count(inst, budget)?;
    let hit = (0..count)
        .into_par_iter()
        .map(|k| (k, inst.accepts_index(k)))
        .find_first(|(_, r)| !matches!(r, Ok(false)));
    match hit {
        Some((_, Err(e))) => Err(e),
        Some((k, Ok(_))) => Ok(SolveReport {
            decision: true,
            witness: Some(Dyadic::grid_point(k, inst.grid_precision)),
            witness_count: None,
            evals: k + 1,
        }),
        None => Ok(SolveReport {
            decision: false,
            witness: None,
            witness_count: None,
            evals: count,
        }),
    }
}

/// Every witness, ascending.
pub fn solve_all(inst: &TelicInstance, budget: &Budget) -> Result<Vec<Dyadic>> {
    let count = grid_count(inst, budget)?;
    let hits: Vec<u64> = (0..count)
        .into_par_iter()
        .filter_map(|k| match inst.accepts_index(k) {
            Ok(true) => Some(Ok(k)),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_>>()?;
    Ok(hits
        .into_iter()
        .map(|k| Dyadic::grid_point(k, inst.grid_precision))
        .collect())
}

/// `solve_all` packaged as a report with the witness count.
pub fn solve_count(inst: &TelicInstance, budget: &Budget) -> Result<SolveReport> {
    let all = solve_all(inst, budget)?;
    Ok(SolveReport {
        decision: !all.is_empty(),
        witness: all.first().cloned(),
        witness_count: Some(all.len() as u64),
        evals: inst.grid_size().unwrap_or(u64::MAX),
    })
}

/// Memoised orbit evaluations `k ↦ F^n(g(k/2^r))`, counting distinct calls.
struct Oracle<'a> {
    inst: &'a TelicInstance,
    memo: HashMap<u64, Quad>,
}

impl<'a> Oracle<'a> {
    fn new(inst: &'a TelicInstance) -> Self {
        Oracle {
            inst,
            memo: HashMap::new(),
        }
    }

    fn at(&mut self, k: u64) -> Result<Quad> {
        if let Some(v) = self.memo.get(&k) {
            return Ok(v.clone());
        }
        let v = self.inst.image(&Quad::dyadic(k, self.inst.grid_precision))?;
        self.memo.insert(k, v.clone());
        Ok(v)
    }

    fn evals(&self) -> u64 {
        self.memo.len() as u64
    }

    /// Smallest `k ∈ [lo, hi)` where the monotone predicate turns true, or `hi`.
    fn first_true(&mut self, lo: u64, hi: u64, pred: impl Fn(&Quad) -> bool) -> Result<u64> {
        let (mut lo, mut hi) = (lo, hi);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if pred(&self.at(mid)?) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(lo)
    }

    /// A witness on `[lo, hi)`, where the orbit is monotone in `k`.
    fn search_arc(&mut self, lo: u64, hi: u64, increasing: bool) -> Result<Option<u64>> {
        if lo >= hi {
            return Ok(None);
        }
        let target = self.inst.target.clone();
        let k = if increasing {
            self.first_true(lo, hi, |y| y >= target.lo())?
        } else {
            self.first_true(lo, hi, |y| y <= target.hi())?
        };
        if k < hi && target.contains(&self.at(k)?) {
            Ok(Some(k))
        } else {
            Ok(None)
        }
    }
}

enum Shape {
    /// The orbit is monotone in the grid index.
    Monotone,
    /// `frac(g(s) + c)` for an increasing homeomorphism `g`: two increasing arcs.
    Rotation,
}

fn shape(inst: &TelicInstance) -> Result<Shape> {
    if inst.effective_n() == 0 {
        return Ok(Shape::Monotone);
    }
    match &inst.system {
        MapSpec::Rotation { .. } => Ok(Shape::Rotation),
        s if s.is_homeomorphism() => Ok(Shape::Monotone),
        s => Err(Error::Unsupported(format!(
            "{s} is not order-compatible; use the brute-force solver"
        ))),
    }
}

/// Binary search over the ordered grid image using `O(r)` evaluations.
///
/// Monotone systems need one search. Rotations first locate the single index
/// where `frac(g(s) + nκ)` wraps past 1, then search the two increasing arcs.
/// The witness found is valid but not necessarily the smallest.
pub fn solve_order(inst: &TelicInstance) -> Result<SolveReport> {
    let shape = shape(inst)?;
    let count = inst
        .grid_size()
        .ok_or_else(|| Error::Resource(format!("grid I_{} is too large", inst.grid_precision)))?;
    let mut oracle = Oracle::new(inst);
    let last = count - 1;
    let first = oracle.at(0)?;
    let witness = match shape {
        Shape::Monotone => {
            let increasing = oracle.at(last)? >= first;
            oracle.search_arc(0, count, increasing)?
        }
        Shape::Rotation => {
            // past the wrap every value is below f(0); before it none is
            let wrap = if oracle.at(last)? >= first {
                count
            } else {
                oracle.first_true(1, last, |y| *y < first)?
            };
            match oracle.search_arc(0, wrap, true)? {
                Some(k) => Some(k),
                None => oracle.search_arc(wrap, count, true)?,
            }
        }
    };
    Ok(SolveReport {
        decision: witness.is_some(),
        witness: witness.map(|k| Dyadic::grid_point(k, inst.grid_precision)),
        witness_count: None,
        evals: oracle.evals(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::IntervalSpec;
    use crate::telic::verify_certificate;

    fn q(s: &str) -> Quad {
        s.parse().unwrap()
    }

    fn inst(system: MapSpec, homeo: MapSpec, n: u32, lo: &str, hi: &str) -> TelicInstance {
        TelicInstance::new(system, homeo, n, IntervalSpec::new(q(lo), q(hi)).unwrap()).unwrap()
    }

    #[test]
    fn brute_examples() {
        let b = Budget::default();
        let d = inst(MapSpec::Doubling, MapSpec::Identity, 2, "1/2", "1/2");
        let rep = solve_brute(&d, &b).unwrap();
        assert_eq!(rep.witness.unwrap().to_string(), "1/8");
        assert_eq!(rep.evals, 3);
        let all: Vec<String> = solve_all(&d, &b).unwrap().iter().map(|w| w.to_string()).collect();
        assert_eq!(all, ["1/8", "3/8", "5/8", "7/8"]);
    }

    #[test]
    fn rotation_example() {
        let b = Budget::default();
        // 2/5 is not in ℚ(√2)'s dyadic lattice; [13/32, 1/2] has the same
        // witnesses on I_4 since no image falls in [2/5, 13/32)
        let rot = inst(MapSpec::default_rotation(), MapSpec::Identity, 2, "13/32", "1/2");
        let rep = solve_brute(&rot, &b).unwrap();
        assert_eq!(rep.witness.unwrap().to_string(), "5/8");
        let ord = solve_order(&rot).unwrap();
        assert!(ord.decision);
        assert!(verify_certificate(&rot, &ord.witness.unwrap().to_quad()));
    }

    #[test]
    fn absent_and_unsupported() {
        let b = Budget::default();
        let third = inst(MapSpec::Identity, MapSpec::Identity, 3, "0", "0");
        assert!(solve_brute(&third, &b).unwrap().decision);
        let miss = inst(MapSpec::Identity, MapSpec::Identity, 3, "1/1024", "1/1024");
        let rep = solve_brute(&miss, &b).unwrap();
        assert!(!rep.decision);
        assert_eq!(rep.evals, 512);
        let tent = inst(MapSpec::Tent, MapSpec::Identity, 2, "0", "1");
        assert!(matches!(solve_order(&tent), Err(Error::Unsupported(_))));
        let big = inst(MapSpec::Tent, MapSpec::Identity, 5, "0", "1");
        assert!(solve_brute(&big, &Budget::new(20)).unwrap_err().is_resource());
    }

    #[test]
    fn squaring_order() {
        let b = Budget::default();
        let sq = inst(MapSpec::Squaring, MapSpec::Identity, 2, "0", "1/16");
        let ord = solve_order(&sq).unwrap();
        let w = ord.witness.unwrap().to_quad();
        assert!(&(&w * &w) * &(&w * &w) <= q("1/16"));
        assert_eq!(ord.decision, solve_brute(&sq, &b).unwrap().decision);
    }

    /// Every dyadic target `[i/2^t, j/2^t]` for a few systems, against brute force.
    #[test]
    fn order_agrees_with_brute() {
        let b = Budget::default();
        let flip = crate::dynamics::PiecewiseAffine::new(
            vec![],
            vec![crate::dynamics::AffineBranch::new(-Quad::one(), Quad::one())],
            false,
        )
        .unwrap();
        let systems = [
            MapSpec::Identity,
            MapSpec::Squaring,
            MapSpec::Alpha,
            MapSpec::default_rotation(),
            MapSpec::PiecewiseAffine(flip.clone()),
        ];
        for system in &systems {
            for homeo in [MapSpec::Identity, MapSpec::Alpha, MapSpec::PiecewiseAffine(flip.clone())] {
                if system.is_circle_kind() && homeo.homeomorphism_orientation() == Some(false) {
                    continue;
                }
                for n in 1..=3u32 {
                    for i in 0..8u64 {
                        for j in i..8u64 {
                            let target =
                                IntervalSpec::new(Quad::dyadic(i, 3), Quad::dyadic(j, 3)).unwrap();
                            let t = TelicInstance::new(system.clone(), homeo.clone(), n, target).unwrap();
                            let brute = solve_brute(&t, &b).unwrap();
                            let ord = solve_order(&t).unwrap();
                            assert_eq!(ord.decision, brute.decision, "{t}");
                            if let Some(w) = &ord.witness {
                                assert!(verify_certificate(&t, &w.to_quad()), "{t}");
                            }
                            assert!(ord.evals <= 3 * (u64::from(t.grid_precision) + 2), "{t}: {}", ord.evals);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tent_mirror_symmetry() {
        let b = Budget::default();
        for i in 0..8u64 {
            for j in i..8u64 {
                let target = IntervalSpec::new(Quad::dyadic(i, 3), Quad::dyadic(j, 3)).unwrap();
                let a = TelicInstance::new(MapSpec::Tent, MapSpec::Identity, 2, target.clone()).unwrap();
                let m = TelicInstance::new(MapSpec::Tent, MapSpec::Identity, 2, target.mirror()).unwrap();
                assert_eq!(
                    solve_all(&a, &b).unwrap().len(),
                    solve_all(&m, &b).unwrap().len()
                );
            }
        }
    }
}
