//! Telic instances: does some dyadic certificate's orbit land in a target?

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{iterate, MapSpec};
use crate::error::{Error, Result};
use crate::exact::{default_kappa, Dyadic, IntervalSpec, Quad};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Decision,
    Search,
}

/// Parameters of a bounded instance: target diameter `a(n) = 2^{−n²}` and
/// iterate count `k(n)` chosen from the rotation number `κ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawBounded")]
pub struct BoundedParams {
    pub kappa: Quad,
}

#[derive(Deserialize)]
struct RawBounded {
    #[serde(default = "default_kappa")]
    kappa: Quad,
}

impl TryFrom<RawBounded> for BoundedParams {
    type Error = Error;
    fn try_from(raw: RawBounded) -> Result<Self> {
        BoundedParams::new(raw.kappa)
    }
}

impl Default for BoundedParams {
    fn default() -> Self {
        BoundedParams {
            kappa: default_kappa(),
        }
    }
}

impl BoundedParams {
    pub fn new(kappa: Quad) -> Result<Self> {
        if kappa.is_rational() {
            return Err(Error::Validation(format!("kappa {kappa} must be irrational")));
        }
        Ok(BoundedParams { kappa })
    }

    /// Target diameter `a(n) = 2^{−n²}`.
    pub fn a(&self, n: u32) -> Dyadic {
        Dyadic::new(1, n * n)
    }

    pub fn k(&self, n: u32) -> u32 {
        k_of_n(n, self)
    }
}

/// `n` if the rotation by `n·κ` moves `0` further than `a(n)` around the
/// circle, else `n + 1`.
pub fn k_of_n(n: u32, params: &BoundedParams) -> u32 {
    let shift = (&params.kappa * &Quad::from_int(n)).frac();
    if shift.circle_dist_to_zero() > params.a(n).to_quad() {
        n
    } else {
        n + 1
    }
}

/// One instance: is there `s ∈ I_r` with `F^n(g(s)) ∈ target`?
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct TelicInstance {
    pub system: MapSpec,
    pub homeo: MapSpec,
    pub n: u32,
    pub target: IntervalSpec,
    pub grid_precision: u32,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounded: Option<BoundedParams>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    system: MapSpec,
    homeo: MapSpec,
    n: u32,
    target: IntervalSpec,
    grid_precision: Option<u32>,
    #[serde(default)]
    mode: Mode,
    bounded: Option<BoundedParams>,
}

impl TryFrom<RawInstance> for TelicInstance {
    type Error = Error;
    fn try_from(raw: RawInstance) -> Result<Self> {
        let mut inst = TelicInstance::new(raw.system, raw.homeo, raw.n, raw.target)?;
        if let Some(r) = raw.grid_precision {
            inst = inst.with_grid_precision(r)?;
        }
        inst.mode = raw.mode;
        inst.bounded = raw.bounded;
        Ok(inst)
    }
}

impl TelicInstance {
    /// A decision instance with the default grid precision `n²`.
    pub fn new(system: MapSpec, homeo: MapSpec, n: u32, target: IntervalSpec) -> Result<Self> {
        let orientation = homeo
            .homeomorphism_orientation()
            .ok_or_else(|| Error::Validation(format!("homeo {homeo} is not a homeomorphism")))?;
        // g(0) = 1 would leave the circle [0, 1)
        if system.is_circle_kind() && !orientation {
            return Err(Error::Validation(format!(
                "circle map {system} needs an increasing homeomorphism, got {homeo}"
            )));
        }
        let grid_precision = n
            .checked_mul(n)
            .ok_or_else(|| Error::Range(format!("n = {n} is too large")))?;
        Ok(TelicInstance {
            system,
            homeo,
            n,
            target,
            grid_precision,
            mode: Mode::Decision,
            bounded: None,
        })
    }

    pub fn with_grid_precision(mut self, r: u32) -> Result<Self> {
        if r < self.n {
            return Err(Error::Validation(format!(
                "grid precision {r} is below n = {}",
                self.n
            )));
        }
        self.grid_precision = r;
        Ok(self)
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// Iterate count actually applied: `k(n)` for bounded instances.
    pub fn effective_n(&self) -> u32 {
        match &self.bounded {
            Some(params) => params.k(self.n),
            None => self.n,
        }
    }

    /// `F^{n}(g(s))` with the effective iterate count.
    pub fn image(&self, s: &Quad) -> Result<Quad> {
        iterate(&self.system, &self.homeo, s, u64::from(self.effective_n()))
    }

    /// Whether grid point `index / 2^r` is a witness.
    pub fn accepts_index(&self, index: u64) -> Result<bool> {
        let s = Quad::dyadic(index, self.grid_precision);
        Ok(self.target.contains(&self.image(&s)?))
    }

    pub fn grid_size(&self) -> Option<u64> {
        1u64.checked_shl(self.grid_precision)
            .filter(|_| self.grid_precision < 64)
    }
}

impl fmt::Display for TelicInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{} n={} target {} on I_{}",
            self.system, self.homeo, self.n, self.target, self.grid_precision
        )
    }
}

/// The grid `I_r = {p/2^r : 0 ≤ p < 2^r}`, ascending and lazy.
pub fn grid(r: u32) -> impl Iterator<Item = Dyadic> {
    let count = if r >= 64 { u64::MAX } else { 1u64 << r };
    (0..count).map(move |k| Dyadic::grid_point(k, r))
}

/// Membership in `I_r` by repeated doubling: after `r` doublings mod 1 a
/// point of `I_r` (and nothing else) has reached zero.
pub fn is_dyadic_of_precision(y: &Quad, r: u32) -> bool {
    if y.is_negative() || *y >= Quad::one() {
        return false;
    }
    let one = Quad::one();
    let mut z = y.clone();
    for _ in 0..r {
        z = z.scale_pow2(1);
        if z >= one {
            z = &z - &one;
        }
    }
    z.is_zero()
}

/// The native verifier: grid membership, then closed-interval membership of
/// the orbit. Any evaluation failure rejects.
pub fn verify_certificate(inst: &TelicInstance, s: &Quad) -> bool {
    is_dyadic_of_precision(s, inst.grid_precision)
        && inst
            .image(s)
            .map(|y| inst.target.contains(&y))
            .unwrap_or(false)
}

/// The bounded instance centred at `c`: rotation by `κ`, identity homeo,
/// target of diameter `a(n)`, `k(n)` iterates, grid `I_{n²}`.
pub fn make_bounded_instance(n: u32, c: &Quad, params: &BoundedParams) -> Result<TelicInstance> {
    let radius = params.a(n).to_quad().half();
    let lo = c - &radius;
    let hi = c + &radius;
    if lo.is_negative() || hi > Quad::one() {
        return Err(Error::Range(format!(
            "center {c} must lie in [{radius}, 1 - {radius}]"
        )));
    }
    let mut inst = TelicInstance::new(
        MapSpec::rotation(params.kappa.clone()),
        MapSpec::Identity,
        n,
        IntervalSpec::new(lo, hi)?,
    )?;
    inst.mode = Mode::Search;
    inst.bounded = Some(params.clone());
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Quad {
        s.parse().unwrap()
    }

    fn point_instance(system: MapSpec, n: u32, y: &str) -> TelicInstance {
        TelicInstance::new(system, MapSpec::Identity, n, IntervalSpec::point(q(y)).unwrap()).unwrap()
    }

    #[test]
    fn grids() {
        assert_eq!(grid(0).collect::<Vec<_>>(), vec![Dyadic::zero()]);
        let g2: Vec<String> = grid(2).map(|d| d.to_string()).collect();
        assert_eq!(g2, ["0", "1/4", "1/2", "3/4"]);
        let g4: Vec<Dyadic> = grid(4).collect();
        assert_eq!(g4.len(), 16);
        assert_eq!(&g4[1] - &g4[0], Dyadic::new(1, 4));
    }

    #[test]
    fn precision_loop() {
        assert!(is_dyadic_of_precision(&q("3/8"), 4));
        assert!(is_dyadic_of_precision(&q("3/8"), 3));
        assert!(!is_dyadic_of_precision(&q("3/8"), 2));
        assert!(!is_dyadic_of_precision(&(Quad::sqrt2() - Quad::one()), 10));
        assert!(!is_dyadic_of_precision(&q("5/4"), 8));
        assert!(!is_dyadic_of_precision(&q("-1/4"), 8));
        assert!(!is_dyadic_of_precision(&Quad::one(), 8));
        assert!(is_dyadic_of_precision(&Quad::zero(), 0));
    }

    #[test]
    fn precision_loop_matches_grid_index() {
        for k in 0..64u64 {
            let d = Dyadic::grid_point(k, 6);
            for r in 0..8 {
                assert_eq!(is_dyadic_of_precision(&d.to_quad(), r), d.grid_index(r).is_some());
            }
        }
    }

    #[test]
    fn certificates() {
        let inst = point_instance(MapSpec::Doubling, 2, "1/2");
        assert!(verify_certificate(&inst, &q("1/8")));
        assert!(!verify_certificate(&inst, &q("1/4")));
        assert!(!verify_certificate(&inst, &q("sqrt2/4")));
        let full = TelicInstance::new(MapSpec::Identity, MapSpec::Identity, 3, IntervalSpec::full())
            .unwrap();
        assert!(verify_certificate(&full, &Quad::zero()));
        assert!(!verify_certificate(&full, &q("1/1024")));
    }

    #[test]
    fn k_rule() {
        let p = BoundedParams::default();
        assert_eq!(k_of_n(1, &p), 2);
        assert_eq!(k_of_n(2, &p), 2);
        assert_eq!(k_of_n(3, &p), 3);
        // oracle: floating circle distances are far from the thresholds here
        let kappa = 2f64.sqrt() - 1.0;
        for n in 2..=6u32 {
            let t = (f64::from(n) * kappa).fract();
            let dist = t.min(1.0 - t);
            let expect = if dist > 2f64.powi(-((n * n) as i32)) { n } else { n + 1 };
            assert_eq!(k_of_n(n, &p), expect);
        }
        assert!(BoundedParams::new(q("1/2")).is_err());
    }

    #[test]
    fn bounded_instances() {
        let p = BoundedParams::default();
        let inst = make_bounded_instance(2, &q("1/2"), &p).unwrap();
        assert_eq!(inst.target, IntervalSpec::new(q("15/32"), q("17/32")).unwrap());
        assert_eq!(inst.effective_n(), 2);
        assert_eq!(inst.grid_precision, 4);
        assert!(matches!(make_bounded_instance(2, &Quad::zero(), &p), Err(Error::Range(_))));
        assert!(make_bounded_instance(2, &q("1/32"), &p).is_ok());
        assert!(make_bounded_instance(2, &q("31/32"), &p).is_ok());
    }

    #[test]
    fn instance_json() {
        let text = r#"{"system": {"kind": "doubling"}, "homeo": {"kind": "identity"}, "n": 2,
                       "target": {"lo": "1/2", "hi": "1/2"}}"#;
        let inst: TelicInstance = serde_json::from_str(text).unwrap();
        assert_eq!(inst, point_instance(MapSpec::Doubling, 2, "1/2"));
        let back: TelicInstance = serde_json::from_str(&serde_json::to_string(&inst).unwrap()).unwrap();
        assert_eq!(back, inst);

        let bounded = r#"{"system": {"kind": "rotation", "kappa": "sqrt2 - 1"}, "homeo": {"kind": "identity"},
                          "n": 1, "target": {"lo": "0", "hi": "1/2"}, "bounded": {}, "mode": "search"}"#;
        let inst: TelicInstance = serde_json::from_str(bounded).unwrap();
        assert_eq!(inst.effective_n(), 2);
        assert_eq!(inst.mode, Mode::Search);

        let bad = r#"{"system": {"kind": "tent"}, "homeo": {"kind": "tent"}, "n": 1,
                      "target": {"lo": "0", "hi": "1"}}"#;
        assert!(serde_json::from_str::<TelicInstance>(bad).is_err());
        let low = r#"{"system": {"kind": "tent"}, "homeo": {"kind": "identity"}, "n": 3,
                      "grid_precision": 2, "target": {"lo": "0", "hi": "1"}}"#;
        assert!(serde_json::from_str::<TelicInstance>(low).is_err());
    }
}
