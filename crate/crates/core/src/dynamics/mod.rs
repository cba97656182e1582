//! Interval and circle maps with exact evaluation in ℚ(√2).

mod grid_image;
mod periodic;
mod preimage;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{default_kappa, Quad, Scalar};

pub(crate) use grid_image::grid_images;
pub use grid_image::{image_of_grid, GridImage};
pub use periodic::{periodic_points, PeriodicPoints};
pub use preimage::preimages;

/// Informational entropy tag carried by each map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyLabel {
    Zero,
    Log2,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineBranch {
    pub slope: Quad,
    pub offset: Quad,
}

impl AffineBranch {
    pub fn new(slope: Quad, offset: Quad) -> Self {
        AffineBranch { slope, offset }
    }

    pub fn apply(&self, x: &Quad) -> Quad {
        &self.slope * x + &self.offset
    }
}

/// A piecewise-affine map of `[0, 1]`.
///
/// `breakpoints` are the interior cut points `0 < b₁ < … < b_m < 1`; branch
/// `i` covers `(b_i, b_{i+1}]` with the first branch closed at 0, so a
/// breakpoint belongs to the branch on its left.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewiseAffine")]
pub struct PiecewiseAffine {
    breakpoints: Vec<Quad>,
    branches: Vec<AffineBranch>,
    mod1: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    entropy_label: Option<EntropyLabel>,
}

#[derive(Deserialize)]
struct RawPiecewiseAffine {
    #[serde(default)]
    breakpoints: Vec<Quad>,
    branches: Vec<AffineBranch>,
    #[serde(default)]
    mod1: bool,
    #[serde(default)]
    entropy_label: Option<EntropyLabel>,
}

impl TryFrom<RawPiecewiseAffine> for PiecewiseAffine {
    type Error = Error;
    fn try_from(raw: RawPiecewiseAffine) -> Result<Self> {
        let mut pwa = PiecewiseAffine::new(raw.breakpoints, raw.branches, raw.mod1)?;
        pwa.entropy_label = raw.entropy_label;
        Ok(pwa)
    }
}

impl PiecewiseAffine {
    pub fn new(breakpoints: Vec<Quad>, branches: Vec<AffineBranch>, mod1: bool) -> Result<Self> {
        if branches.len() != breakpoints.len() + 1 {
            return Err(Error::Validation(format!(
                "{} breakpoints need {} branches, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                branches.len()
            )));
        }
        let mut prev = Quad::zero();
        for b in &breakpoints {
            if *b <= prev || *b >= Quad::one() {
                return Err(Error::Validation(format!(
                    "breakpoints must increase strictly inside (0, 1); offending {b}"
                )));
            }
            prev = b.clone();
        }
        if let Some(flat) = branches.iter().find(|br| br.slope.is_zero()) {
            return Err(Error::Validation(format!(
                "branch with zero slope (offset {}) is not supported",
                flat.offset
            )));
        }
        Ok(PiecewiseAffine {
            breakpoints,
            branches,
            mod1,
            entropy_label: None,
        })
    }

    /// The homeomorphism with slopes `1/√2` and `√2` joined at `2 − √2`.
    pub fn alpha() -> Self {
        let one = Quad::one();
        let sqrt2 = Quad::sqrt2();
        PiecewiseAffine::new(
            vec![Quad::from_int(2) - &sqrt2],
            vec![
                AffineBranch::new(sqrt2.half(), Quad::zero()),
                AffineBranch::new(sqrt2.clone(), &one - &sqrt2),
            ],
            false,
        )
        .expect("alpha is well formed")
    }

    pub fn breakpoints(&self) -> &[Quad] {
        &self.breakpoints
    }

    pub fn branches(&self) -> &[AffineBranch] {
        &self.branches
    }

    pub fn is_mod1(&self) -> bool {
        self.mod1
    }

    pub fn with_entropy_label(mut self, label: EntropyLabel) -> Self {
        self.entropy_label = Some(label);
        self
    }

    fn pieces(&self) -> Vec<Piece> {
        let mut lo = Quad::zero();
        let mut out = Vec::with_capacity(self.branches.len());
        for (i, br) in self.branches.iter().enumerate() {
            let hi = self.breakpoints.get(i).cloned().unwrap_or_else(Quad::one);
            out.push(Piece {
                lo: lo.clone(),
                hi: hi.clone(),
                branch: br.clone(),
            });
            lo = hi;
        }
        out
    }

    fn is_continuous(&self) -> bool {
        self.breakpoints.iter().enumerate().all(|(i, b)| {
            self.branches[i].apply(b) == self.branches[i + 1].apply(b)
        })
    }
}

/// One affine piece on the closed interval `[lo, hi]`.
#[derive(Debug, Clone)]
pub(crate) struct Piece {
    pub lo: Quad,
    pub hi: Quad,
    pub branch: AffineBranch,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MapSpec {
    Identity,
    /// `2·min(x, 1 − x)`
    Tent,
    /// `2x mod 1`
    Doubling,
    /// `x²`
    Squaring,
    /// `x + κ mod 1`
    Rotation { kappa: Quad },
    Alpha,
    #[serde(rename = "pwa")]
    PiecewiseAffine(PiecewiseAffine),
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSpec::Identity => f.write_str("identity"),
            MapSpec::Tent => f.write_str("tent"),
            MapSpec::Doubling => f.write_str("doubling"),
            MapSpec::Squaring => f.write_str("squaring"),
            MapSpec::Rotation { kappa } => write!(f, "rotation({kappa})"),
            MapSpec::Alpha => f.write_str("alpha"),
            MapSpec::PiecewiseAffine(p) => write!(f, "pwa({} branches)", p.branches.len()),
        }
    }
}

impl MapSpec {
    pub fn rotation(kappa: Quad) -> Self {
        MapSpec::Rotation { kappa }
    }

    /// Rotation by the default `κ = √2 − 1`.
    pub fn default_rotation() -> Self {
        MapSpec::Rotation {
            kappa: default_kappa(),
        }
    }

    /// Looks a map up by its JSON kind name (rotation uses `κ = √2 − 1`).
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "identity" | "id" => MapSpec::Identity,
            "tent" => MapSpec::Tent,
            "doubling" => MapSpec::Doubling,
            "squaring" => MapSpec::Squaring,
            "rotation" => MapSpec::default_rotation(),
            "alpha" => MapSpec::Alpha,
            _ => return None,
        })
    }

    pub fn entropy_label(&self) -> EntropyLabel {
        match self {
            MapSpec::Tent | MapSpec::Doubling => EntropyLabel::Log2,
            MapSpec::Identity | MapSpec::Squaring | MapSpec::Rotation { .. } | MapSpec::Alpha => {
                EntropyLabel::Zero
            }
            MapSpec::PiecewiseAffine(p) => p.entropy_label.unwrap_or(EntropyLabel::Unknown),
        }
    }

    /// Maps of the circle `[0, 1)` rather than the closed interval.
    pub fn is_circle_kind(&self) -> bool {
        match self {
            MapSpec::Doubling | MapSpec::Rotation { .. } => true,
            MapSpec::PiecewiseAffine(p) => p.mod1,
            _ => false,
        }
    }

    /// Orientation of a homeomorphism of `[0, 1]`: `Some(true)` if increasing.
    pub fn homeomorphism_orientation(&self) -> Option<bool> {
        match self {
            MapSpec::Identity | MapSpec::Alpha | MapSpec::Squaring => Some(true),
            MapSpec::PiecewiseAffine(p) if !p.mod1 && p.is_continuous() => {
                let inc = p.branches.iter().all(|b| !b.slope.is_negative());
                let dec = p.branches.iter().all(|b| b.slope.is_negative());
                let f0 = p.branches[0].apply(&Quad::zero());
                let f1 = p.branches.last().unwrap().apply(&Quad::one());
                if inc && f0.is_zero() && f1 == Quad::one() {
                    Some(true)
                } else if dec && f0 == Quad::one() && f1.is_zero() {
                    Some(false)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn is_homeomorphism(&self) -> bool {
        self.homeomorphism_orientation().is_some()
    }

    /// Preserves Lebesgue measure on `[0, 1]`.
    pub fn is_measure_preserving(&self) -> bool {
        matches!(
            self,
            MapSpec::Identity | MapSpec::Rotation { .. } | MapSpec::Doubling | MapSpec::Tent
        )
    }

    /// Not injective on the unit interval.
    pub fn is_many_to_one(&self) -> bool {
        match self {
            MapSpec::Tent | MapSpec::Doubling => true,
            MapSpec::PiecewiseAffine(p) => {
                if p.mod1 {
                    // injective only if the total image length is at most one
                    let total = p
                        .pieces()
                        .iter()
                        .map(|pc| (&pc.branch.slope * (&pc.hi - &pc.lo)).abs())
                        .fold(Quad::zero(), |a, b| a + b);
                    total > Quad::one()
                } else {
                    self.homeomorphism_orientation().is_none()
                }
            }
            _ => false,
        }
    }

    /// Affine pieces and the mod-1 flag, for the piecewise-affine kinds.
    pub(crate) fn affine_pieces(&self) -> Option<(Vec<Piece>, bool)> {
        let whole = |slope: Quad, offset: Quad| Piece {
            lo: Quad::zero(),
            hi: Quad::one(),
            branch: AffineBranch::new(slope, offset),
        };
        Some(match self {
            MapSpec::Identity => (vec![whole(Quad::one(), Quad::zero())], false),
            MapSpec::Tent => {
                let half = Quad::dyadic(1, 1);
                let two = Quad::from_int(2);
                (
                    vec![
                        Piece {
                            lo: Quad::zero(),
                            hi: half.clone(),
                            branch: AffineBranch::new(two.clone(), Quad::zero()),
                        },
                        Piece {
                            lo: half,
                            hi: Quad::one(),
                            branch: AffineBranch::new(-&two, two),
                        },
                    ],
                    false,
                )
            }
            MapSpec::Doubling => (vec![whole(Quad::from_int(2), Quad::zero())], true),
            MapSpec::Rotation { kappa } => (vec![whole(Quad::one(), kappa.clone())], true),
            MapSpec::Alpha => (PiecewiseAffine::alpha().pieces(), false),
            MapSpec::PiecewiseAffine(p) => (p.pieces(), p.mod1),
            MapSpec::Squaring => return None,
        })
    }

    pub fn check_domain<T: Scalar>(&self, x: &T) -> Result<()> {
        let one = T::from_quad(&Quad::one());
        let ok = if self.is_circle_kind() {
            !x.is_negative() && *x < one
        } else {
            !x.is_negative() && *x <= one
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain {
                map: self.to_string(),
                value: x.to_string(),
            })
        }
    }

    /// Exact image of `x`.
    pub fn eval<T: Scalar>(&self, x: &T) -> Result<T> {
        self.check_domain(x)?;
        let y = self.eval_unchecked(x);
        if let MapSpec::PiecewiseAffine(p) = self {
            if !p.mod1 && (y.is_negative() || y > T::from_quad(&Quad::one())) {
                return Err(Error::Range(format!("{self} leaves [0, 1] with value {y}")));
            }
        }
        Ok(y)
    }

    fn eval_unchecked<T: Scalar>(&self, x: &T) -> T {
        let affine = |b: &AffineBranch| T::from_quad(&b.slope).times(x).plus(&T::from_quad(&b.offset));
        match self {
            MapSpec::Identity => x.clone(),
            MapSpec::Tent => {
                let two = T::from_quad(&Quad::from_int(2));
                if *x <= T::from_quad(&Quad::dyadic(1, 1)) {
                    two.times(x)
                } else {
                    two.minus(&two.times(x))
                }
            }
            MapSpec::Doubling => T::from_quad(&Quad::from_int(2)).times(x).frac(),
            MapSpec::Squaring => x.times(x),
            MapSpec::Rotation { kappa } => x.plus(&T::from_quad(kappa)).frac(),
            MapSpec::Alpha => {
                let sqrt2 = Quad::sqrt2();
                let breakpoint = Quad::from_int(2) - &sqrt2;
                if *x <= T::from_quad(&breakpoint) {
                    T::from_quad(&sqrt2.half()).times(x)
                } else {
                    T::from_quad(&sqrt2)
                        .times(x)
                        .plus(&T::from_quad(&(Quad::one() - sqrt2)))
                }
            }
            MapSpec::PiecewiseAffine(p) => {
                let idx = p
                    .breakpoints
                    .iter()
                    .position(|b| *x <= T::from_quad(b))
                    .unwrap_or(p.breakpoints.len());
                let y = affine(&p.branches[idx]);
                if p.mod1 {
                    y.frac()
                } else {
                    y
                }
            }
        }
    }

    /// `self^n(x)`.
    pub fn eval_n<T: Scalar>(&self, x: &T, n: u64) -> Result<T> {
        match self {
            MapSpec::Rotation { kappa } => {
                self.check_domain(x)?;
                let shift = kappa * &Quad::from_int(n);
                Ok(x.plus(&T::from_quad(&shift)).frac())
            }
            MapSpec::Doubling => {
                self.check_domain(x)?;
                let k = i64::try_from(n).map_err(|_| Error::Range(format!("{n} iterates")))?;
                Ok(T::from_quad(&Quad::one().scale_pow2(k)).times(x).frac())
            }
            MapSpec::Identity => {
                self.check_domain(x)?;
                Ok(x.clone())
            }
            _ => {
                let mut y = x.clone();
                for _ in 0..n {
                    y = self.eval(&y)?;
                }
                Ok(y)
            }
        }
    }

    /// Inverse of a homeomorphism at `y`, when it stays exactly representable.
    pub fn invert(&self, y: &Quad) -> Result<Quad> {
        if !self.is_homeomorphism() {
            return Err(Error::Unsupported(format!("{self} is not a homeomorphism")));
        }
        self.check_domain(y)?;
        match self {
            MapSpec::Identity => Ok(y.clone()),
            MapSpec::Squaring => preimage::exact_sqrt(y)
                .ok_or_else(|| Error::Unsupported(format!("square root of {y} is not dyadic"))),
            _ => {
                let (pieces, _) = self.affine_pieces().expect("affine homeomorphism");
                let mut off_lattice = false;
                for pc in pieces {
                    match (y - &pc.branch.offset).checked_div(&pc.branch.slope) {
                        Some(x) if pc.lo <= x && x <= pc.hi => return Ok(x),
                        Some(_) => {}
                        None => off_lattice = true,
                    }
                }
                if off_lattice {
                    return Err(Error::Unsupported(format!(
                        "inverse of {self} at {y} leaves the lattice"
                    )));
                }
                Err(Error::Range(format!("{y} has no preimage under {self}")))
            }
        }
    }
}

/// `F^n(g(x))`: one application of the homeomorphism `g`, then `n` iterates of `F`.
pub fn iterate<T: Scalar>(system: &MapSpec, homeo: &MapSpec, x: &T, n: u64) -> Result<T> {
    if !homeo.is_homeomorphism() {
        return Err(Error::Validation(format!("{homeo} is not a homeomorphism")));
    }
    let y = homeo.eval(x)?;
    system.eval_n(&y, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Quad {
        s.parse().unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(MapSpec::Tent.eval(&q("3/4")).unwrap(), q("1/2"));
        let bp = Quad::from_int(2) - Quad::sqrt2();
        assert_eq!(MapSpec::Alpha.eval(&bp).unwrap(), Quad::sqrt2() - Quad::one());
        assert_eq!(
            MapSpec::default_rotation().eval(&Quad::zero()).unwrap(),
            Quad::sqrt2() - Quad::one()
        );
        assert_eq!(MapSpec::Squaring.eval(&q("3/4")).unwrap(), q("9/16"));
        assert_eq!(MapSpec::Doubling.eval(&q("3/4")).unwrap(), q("1/2"));
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            MapSpec::Doubling.eval(&Quad::one()),
            Err(Error::Domain { .. })
        ));
        assert!(MapSpec::Tent.eval(&Quad::one()).is_ok());
        assert!(MapSpec::Tent.eval(&q("5/4")).is_err());
        assert!(MapSpec::Squaring.eval(&q("-1/4")).is_err());
    }

    #[test]
    fn iterate_examples() {
        let id = MapSpec::Identity;
        assert_eq!(iterate(&MapSpec::Doubling, &id, &q("5/8"), 2).unwrap(), q("1/2"));
        assert_eq!(iterate(&MapSpec::Tent, &id, &q("1/2"), 1).unwrap(), Quad::one());
        // frac(2·α(1/2)) = frac(√2/2)
        assert_eq!(
            iterate(&MapSpec::Doubling, &MapSpec::Alpha, &q("1/2"), 1).unwrap(),
            Quad::new(0, 1, 1)
        );
        assert_eq!(iterate(&MapSpec::Tent, &id, &q("3/8"), 0).unwrap(), q("3/8"));
        assert!(iterate(&MapSpec::Tent, &MapSpec::Doubling, &q("1/2"), 1).is_err());
    }

    #[test]
    fn closed_forms_match_stepping() {
        let rot = MapSpec::default_rotation();
        let x = q("3/16");
        let mut y = x.clone();
        for n in 0..12u64 {
            assert_eq!(rot.eval_n(&x, n).unwrap(), y);
            assert_eq!(
                MapSpec::Doubling.eval_n(&x, n).unwrap(),
                (0..n).try_fold(x.clone(), |acc, _| MapSpec::Doubling.eval(&acc)).unwrap()
            );
            y = rot.eval(&y).unwrap();
        }
    }

    #[test]
    fn alpha_matches_its_piecewise_form() {
        let pwa = MapSpec::PiecewiseAffine(PiecewiseAffine::alpha());
        for k in 0..=64u64 {
            let x = Quad::dyadic(k, 6);
            assert_eq!(MapSpec::Alpha.eval(&x).unwrap(), pwa.eval(&x).unwrap());
        }
        let bp = Quad::from_int(2) - Quad::sqrt2();
        assert_eq!(MapSpec::Alpha.eval(&bp).unwrap(), pwa.eval(&bp).unwrap());
        assert_eq!(MapSpec::Alpha.eval(&Quad::zero()).unwrap(), Quad::zero());
        assert_eq!(MapSpec::Alpha.eval(&Quad::one()).unwrap(), Quad::one());
    }

    #[test]
    fn inverse_of_homeomorphisms() {
        for k in 0..=32u64 {
            let x = Quad::dyadic(k, 5);
            let y = MapSpec::Alpha.eval(&x).unwrap();
            assert_eq!(MapSpec::Alpha.invert(&y).unwrap(), x);
        }
        assert_eq!(MapSpec::Squaring.invert(&q("9/16")).unwrap(), q("3/4"));
        assert!(MapSpec::Squaring.invert(&q("1/2")).is_err());
        assert!(MapSpec::Tent.invert(&q("1/2")).is_err());
    }

    #[test]
    fn classification() {
        assert!(MapSpec::Alpha.is_homeomorphism());
        assert!(!MapSpec::Tent.is_homeomorphism());
        assert!(!MapSpec::default_rotation().is_homeomorphism());
        assert!(MapSpec::Tent.is_many_to_one());
        assert!(!MapSpec::Squaring.is_measure_preserving());
        let flip = PiecewiseAffine::new(
            vec![],
            vec![AffineBranch::new(-Quad::one(), Quad::one())],
            false,
        )
        .unwrap();
        assert_eq!(
            MapSpec::PiecewiseAffine(flip).homeomorphism_orientation(),
            Some(false)
        );
        assert_eq!(MapSpec::Tent.entropy_label(), EntropyLabel::Log2);
    }

    #[test]
    fn pwa_validation_and_json() {
        assert!(PiecewiseAffine::new(vec![q("1/2")], vec![], false).is_err());
        assert!(PiecewiseAffine::new(
            vec![q("1/2"), q("1/4")],
            vec![AffineBranch::new(Quad::one(), Quad::zero()); 3],
            false
        )
        .is_err());
        let m: MapSpec = serde_json::from_str(
            r#"{"kind":"pwa","breakpoints":["1/2"],"branches":[{"slope":"2","offset":"0"},{"slope":"-2","offset":"2"}],"mod1":false}"#,
        )
        .unwrap();
        for k in 0..=16u64 {
            let x = Quad::dyadic(k, 4);
            assert_eq!(m.eval(&x).unwrap(), MapSpec::Tent.eval(&x).unwrap());
        }
        let rot: MapSpec = serde_json::from_str(r#"{"kind":"rotation","kappa":"(-1 + 1*sqrt2)"}"#).unwrap();
        assert_eq!(rot, MapSpec::default_rotation());
        let text = serde_json::to_string(&rot).unwrap();
        assert_eq!(serde_json::from_str::<MapSpec>(&text).unwrap(), rot);
        assert!(serde_json::from_str::<MapSpec>(r#"{"kind":"logistic"}"#).is_err());
    }
}
