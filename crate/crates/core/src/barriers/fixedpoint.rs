use serde::{Deserialize, Serialize};

use crate::exact::{Dyadic, Quad};
use crate::telic::BoundedParams;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedpointRow {
    pub n: u32,
    pub k: u32,
    /// `a(n)`, the target diameter.
    pub a: Dyadic,
    /// `frac(k(n)·κ)`, how far `F^{k(n)}` moves every point.
    pub translation: Quad,
    pub circle_dist: Quad,
    /// Every diameter-`a(n)` target is disjoint from its own `F^{k(n)}` image.
    pub disjoint_for_all_j: bool,
}

/// Per-`n` facts about the bounded rotation problem, for `1 ≤ n ≤ n_max`.
///
/// A closed arc of length `a` and its rotation by `t` are disjoint exactly
/// when the circle distance of `t` from 0 exceeds `a`.
pub fn fixedpoint_report(n_max: u32, params: &BoundedParams) -> Vec<FixedpointRow> {
    (1..=n_max)
        .map(|n| {
            let k = params.k(n);
            let a = params.a(n);
            let translation = (&params.kappa * &Quad::from_int(k)).frac();
            let circle_dist = translation.circle_dist_to_zero();
            FixedpointRow {
                n,
                k,
                disjoint_for_all_j: circle_dist > a.to_quad(),
                a,
                translation,
                circle_dist,
            }
        })
        .collect()
}
