use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::dynamics::{grid_images, iterate, MapSpec};
use crate::error::{Error, Result};
use crate::exact::{Dyadic, IntervalSpec, Quad};
use crate::solvers::{solve_brute, solve_order};
use crate::telic::{BoundedParams, TelicInstance};

/// Extra bits of the grid standing in for "every `x ∈ I`".
pub const SURROGATE_EXTRA_BITS: u32 = 4;

const MAX_DOMAIN_GRID: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "1")]
    L1,
    #[serde(rename = "2")]
    L2,
    #[serde(rename = "3")]
    L3,
    #[serde(rename = "4")]
    L4,
    #[serde(rename = "4a")]
    L4a,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::L1 => "1",
            Level::L2 => "2",
            Level::L3 => "3",
            Level::L4 => "4",
            Level::L4a => "4a",
        })
    }
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "1" => Level::L1,
            "2" => Level::L2,
            "3" => Level::L3,
            "4" => Level::L4,
            "4a" => Level::L4a,
            _ => return Err(Error::Validation(format!("unknown reduction level {s:?}"))),
        })
    }
}

impl Level {
    /// Levels quantified over all of `I` rather than the grid.
    fn uses_surrogate(self) -> bool {
        matches!(self, Level::L2 | Level::L4a)
    }

    fn is_biconditional(self) -> bool {
        matches!(self, Level::L1 | Level::L2 | Level::L3)
    }
}

/// One side of a reduction: `x ↦ system^iterates(homeo(x))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Side {
    pub system: MapSpec,
    pub homeo: MapSpec,
    pub iterates: u32,
}

impl Side {
    pub fn new(system: MapSpec, homeo: MapSpec, iterates: u32) -> Result<Self> {
        if !homeo.is_homeomorphism() {
            return Err(Error::Validation(format!("homeo {homeo} is not a homeomorphism")));
        }
        Ok(Side {
            system,
            homeo,
            iterates,
        })
    }

    fn image(&self, x: &Quad) -> Result<Quad> {
        iterate(&self.system, &self.homeo, x, u64::from(self.iterates))
    }

    fn images(&self, precision: u32) -> Result<Vec<Quad>> {
        grid_images(&self.system, &self.homeo, u64::from(self.iterates), precision)
    }

    fn is_trivial(&self) -> bool {
        self.homeo == MapSpec::Identity && (self.system == MapSpec::Identity || self.iterates == 0)
    }
}

/// The two search problems a family `η_n` is meant to connect, at one `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionSetup {
    pub from: Side,
    pub to: Side,
    pub n: u32,
    pub grid_precision: u32,
}

impl ReductionSetup {
    /// Both sides iterated `n` times over `I_{n²}`.
    pub fn new(from: (MapSpec, MapSpec), to: (MapSpec, MapSpec), n: u32) -> Result<Self> {
        Ok(ReductionSetup {
            from: Side::new(from.0, from.1, n)?,
            to: Side::new(to.0, to.1, n)?,
            n,
            grid_precision: n * n,
        })
    }

    /// The bounded rotation problem reduced to the trivial identity problem.
    pub fn bounded(n: u32, params: &BoundedParams) -> Result<Self> {
        Ok(ReductionSetup {
            from: Side::new(MapSpec::rotation(params.kappa.clone()), MapSpec::Identity, params.k(n))?,
            to: Side::new(MapSpec::Identity, MapSpec::Identity, n)?,
            n,
            grid_precision: n * n,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaEntry {
    pub from: IntervalSpec,
    pub to: IntervalSpec,
}

/// A finite table of `η_n : J ↦ K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawEta")]
pub struct EtaTable {
    pub n: u32,
    pub entries: Vec<EtaEntry>,
    /// When set, the table must hold every interval with endpoints on `I_d ∪ {1}`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain_grid: Option<u32>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawEta {
    Full {
        n: u32,
        entries: Vec<EtaEntry>,
        domain_grid: Option<u32>,
    },
    List(Vec<EtaEntry>),
}

impl TryFrom<RawEta> for EtaTable {
    type Error = Error;
    fn try_from(raw: RawEta) -> Result<Self> {
        match raw {
            RawEta::Full {
                n,
                entries,
                domain_grid,
            } => EtaTable::new(n, entries, domain_grid),
            // a bare list takes its n from the setup it is checked against
            RawEta::List(entries) => EtaTable::new(0, entries, None),
        }
    }
}

impl EtaTable {
    pub fn new(n: u32, entries: Vec<EtaEntry>, domain_grid: Option<u32>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(&e.from) {
                return Err(Error::Validation(format!("eta maps {} twice", e.from)));
            }
        }
        if let Some(d) = domain_grid {
            if d > MAX_DOMAIN_GRID {
                return Err(Error::Validation(format!(
                    "domain grid {d} is finer than {MAX_DOMAIN_GRID} bits"
                )));
            }
            if let Some(j) = dyadic_intervals(d).into_iter().find(|j| !seen.contains(j)) {
                return Err(Error::Validation(format!(
                    "eta is not total on its domain grid: {j} is missing"
                )));
            }
        }
        Ok(EtaTable {
            n,
            entries,
            domain_grid,
        })
    }

    pub fn identity(n: u32, keys: impl IntoIterator<Item = IntervalSpec>) -> Self {
        let entries = keys
            .into_iter()
            .map(|j| EtaEntry {
                from: j.clone(),
                to: j,
            })
            .collect();
        EtaTable::new(n, entries, None).expect("identity tables have distinct keys")
    }
}

/// Every interval with endpoints on `I_d ∪ {1}`.
pub fn dyadic_intervals(d: u32) -> Vec<IntervalSpec> {
    let size = 1u64 << d;
    let mut out = Vec::new();
    for i in 0..=size {
        for j in i..=size {
            out.push(IntervalSpec::new(Quad::dyadic(i, d), Quad::dyadic(j, d)).expect("ordered"));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `x` lands in exactly one of `J` (from side) and `K` (to side).
    Mismatch { x: Dyadic, from_hit: bool, to_hit: bool },
    /// `x` lands in `K` but not in `J`.
    Implication { x: Dyadic },
    /// `K` has no solution while `x` solves `J`.
    NoSolution { x: Dyadic },
    /// A point `J` mapped to a proper interval.
    PointToInterval,
    /// `|K| > |J|`.
    Length,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryVerdict {
    pub from: IntervalSpec,
    pub to: IntervalSpec,
    pub pass: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub level: Level,
    pub n: u32,
    pub grid_precision: u32,
    /// Precision of the grid used for "all x ∈ I", when the level needs it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surrogate_precision: Option<u32>,
    pub measure_checks: bool,
    pub all_pass: bool,
    pub entries: Vec<EntryVerdict>,
}

/// Grid images of both sides at one precision.
struct Images {
    precision: u32,
    from: Vec<Quad>,
    to: Vec<Quad>,
}

impl Images {
    fn new(setup: &ReductionSetup, precision: u32, budget: &Budget) -> Result<Self> {
        budget.check_grid(precision, "reduction check")?;
        Ok(Images {
            precision,
            from: setup.from.images(precision)?,
            to: setup.to.images(precision)?,
        })
    }

    fn point(&self, k: usize) -> Dyadic {
        Dyadic::grid_point(k as u64, self.precision)
    }
}

/// Checks every `(J, K)` entry against the level's condition.
///
/// Grid conditions are decided over `I_{n²}`; conditions over all of `I`
/// (levels 2 and 4a) use the finer grid `I_{n²+4}` as a stand-in. When the
/// target side is the trivial system only grid points inside `K` are visited,
/// so level 4 stays cheap for large `n`.
pub fn check_reduction_family(
    eta: &EtaTable,
    level: Level,
    setup: &ReductionSetup,
    budget: &Budget,
) -> Result<ReductionReport> {
    if eta.n != 0 && eta.n != setup.n {
        return Err(Error::Validation(format!(
            "eta is for n = {}, setup is for n = {}",
            eta.n, setup.n
        )));
    }
    if level == Level::L1 && setup.from.homeo != setup.to.homeo {
        return Err(Error::Validation(format!(
            "level 1 needs one homeomorphism on both sides, got {} and {}",
            setup.from.homeo, setup.to.homeo
        )));
    }
    let r = setup.grid_precision;
    let surrogate = level.uses_surrogate().then_some(r + SURROGATE_EXTRA_BITS);
    let to_preserves = setup.to.system.is_measure_preserving();
    let length_check = level == Level::L4a && to_preserves;
    let point_check = level == Level::L1
        || (level == Level::L4a
            && (to_preserves || (setup.from.system.is_many_to_one() && setup.to.system.is_homeomorphism())));

    let sparse = matches!(level, Level::L4 | Level::L4a) && setup.to.is_trivial();
    let dense = if sparse {
        None
    } else {
        let grid = Images::new(setup, r, budget)?;
        let fine = match surrogate {
            Some(p) => Some(Images::new(setup, p, budget)?),
            None => None,
        };
        Some((grid, fine))
    };

    let verdicts: Vec<EntryVerdict> = eta
        .entries
        .par_iter()
        .map(|e| {
            let mut violations = Vec::new();
            let found = match &dense {
                Some((grid, fine)) => dense_violation(level, e, grid, fine.as_ref()),
                None => sparse_violation(e, setup, surrogate.unwrap_or(r), budget)?,
            };
            violations.extend(found);
            if point_check && e.from.is_degenerate() && !e.to.is_degenerate() {
                violations.push(Violation::PointToInterval);
            }
            if length_check && e.to.length() > e.from.length() {
                violations.push(Violation::Length);
            }
            Ok(EntryVerdict {
                from: e.from.clone(),
                to: e.to.clone(),
                pass: violations.is_empty(),
                violations,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ReductionReport {
        level,
        n: setup.n,
        grid_precision: r,
        surrogate_precision: surrogate,
        measure_checks: length_check,
        all_pass: verdicts.iter().all(|v| v.pass),
        entries: verdicts,
    })
}

fn dense_violation(level: Level, e: &EtaEntry, grid: &Images, fine: Option<&Images>) -> Option<Violation> {
    let wide = fine.unwrap_or(grid);
    if level.is_biconditional() {
        return (0..wide.from.len()).find_map(|k| {
            let from_hit = e.from.contains(&wide.from[k]);
            let to_hit = e.to.contains(&wide.to[k]);
            (from_hit != to_hit).then(|| Violation::Mismatch {
                x: wide.point(k),
                from_hit,
                to_hit,
            })
        });
    }
    if let Some(k) = (0..wide.to.len()).find(|&k| e.to.contains(&wide.to[k]) && !e.from.contains(&wide.from[k])) {
        return Some(Violation::Implication { x: wide.point(k) });
    }
    let to_empty = !grid.to.iter().any(|y| e.to.contains(y));
    if to_empty {
        if let Some(k) = grid.from.iter().position(|y| e.from.contains(y)) {
            return Some(Violation::NoSolution { x: grid.point(k) });
        }
    }
    None
}

/// Grid indices `k` with `k/2^p ∈ [lo, hi]`, as an inclusive range.
fn indices_within(iv: &IntervalSpec, p: u32) -> (BigInt, BigInt) {
    let first = -(-iv.lo().scale_pow2(i64::from(p))).floor();
    let cap = (BigInt::from(1) << p) - 1;
    let last = iv.hi().scale_pow2(i64::from(p)).floor().min(cap);
    (first, last)
}

fn sparse_violation(e: &EtaEntry, setup: &ReductionSetup, p: u32, budget: &Budget) -> Result<Option<Violation>> {
    let (first, last) = indices_within(&e.to, p);
    if first <= last {
        let span = (&last - &first + 1u32).to_u128().unwrap_or(u128::MAX);
        budget.check_work(span, "points inside a target interval")?;
        let mut k = first;
        while k <= last {
            let x = Quad::dyadic(k.clone(), p);
            if !e.from.contains(&setup.from.image(&x)?) {
                return Ok(Some(Violation::Implication {
                    x: Dyadic::new(k, p),
                }));
            }
            k += 1;
        }
    }
    let (g_first, g_last) = indices_within(&e.to, setup.grid_precision);
    if g_first <= g_last {
        return Ok(None);
    }
    // K misses I_{n²}, so J must be unsolvable too
    let mut inst = TelicInstance::new(
        setup.from.system.clone(),
        setup.from.homeo.clone(),
        setup.from.iterates,
        e.from.clone(),
    )?;
    inst.grid_precision = setup.grid_precision;
    let report = if budget.check_grid(inst.grid_precision, "").is_ok() {
        solve_brute(&inst, budget)?
    } else {
        solve_order(&inst).map_err(|err| match err {
            Error::Unsupported(msg) => Error::Resource(msg),
            other => other,
        })?
    };
    Ok(report.witness.map(|x| Violation::NoSolution { x }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetFeasibility {
    pub target: IntervalSpec,
    /// Grid points solving `J` on the from side.
    pub solutions: u64,
    pub feasible: bool,
    pub passing_candidates: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_length: Option<Quad>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shortest: Option<IntervalSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub level: Level,
    pub n: u32,
    pub candidate_precision: u32,
    pub candidates: u64,
    pub all_infeasible: bool,
    pub targets: Vec<TargetFeasibility>,
}

/// For each target `J = [p/2^n, (p+1)/2^n]`, whether any candidate `K` with
/// endpoints on `I_c ∪ {1}` satisfies the level's condition for `J`.
pub fn search_reduction_level(
    level: Level,
    setup: &ReductionSetup,
    candidate_precision: u32,
    budget: &Budget,
) -> Result<SearchReport> {
    if !matches!(level, Level::L3 | Level::L4) {
        return Err(Error::Validation(format!("search covers levels 3 and 4, not {level}")));
    }
    let n = setup.n;
    let r = setup.grid_precision;
    budget.check_grid(r, "reduction search")?;
    budget.check_grid(candidate_precision.saturating_mul(2).saturating_sub(1), "candidate intervals")?;
    let targets: Vec<IntervalSpec> = (0..1u64 << n)
        .map(|p| IntervalSpec::new(Quad::dyadic(p, n), Quad::dyadic(p + 1, n)))
        .collect::<Result<_>>()?;
    let candidates = dyadic_intervals(candidate_precision);
    let points = 1u128 << r;
    budget.check_work(
        candidates.len() as u128 * points,
        "reduction search",
    )?;
    let images = Images::new(setup, r, budget)?;

    // Hit sets of each candidate on the to side, shared by all targets.
    let to_hits: Vec<Vec<bool>> = candidates
        .par_iter()
        .map(|k| images.to.iter().map(|y| k.contains(y)).collect())
        .collect();

    let rows = targets
        .par_iter()
        .map(|j| {
            let from_hits: Vec<bool> = images.from.iter().map(|y| j.contains(y)).collect();
            let solvable = from_hits.iter().any(|&h| h);
            let mut passing = 0u64;
            let mut shortest: Option<&IntervalSpec> = None;
            for (k, hits) in candidates.iter().zip(&to_hits) {
                let ok = match level {
                    Level::L3 => *hits == from_hits,
                    _ => {
                        let sound = hits.iter().zip(&from_hits).all(|(&t, &f)| !t || f);
                        let reaches = hits.iter().any(|&t| t);
                        sound && (reaches || !solvable)
                    }
                };
                if ok {
                    passing += 1;
                    if shortest.is_none_or(|s| k.length() < s.length()) {
                        shortest = Some(k);
                    }
                }
            }
            TargetFeasibility {
                target: j.clone(),
                solutions: from_hits.iter().filter(|&&h| h).count() as u64,
                feasible: passing > 0,
                passing_candidates: passing,
                min_length: shortest.map(IntervalSpec::length),
                shortest: shortest.cloned(),
            }
        })
        .collect::<Vec<_>>();
    Ok(SearchReport {
        level,
        n,
        candidate_precision,
        candidates: candidates.len() as u64,
        all_infeasible: rows.iter().all(|t| !t.feasible),
        targets: rows,
    })
}
