use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{iterate, MapSpec};
use crate::budget::Budget;
use crate::error::Result;
use crate::exact::Quad;

/// Distinct-value statistics of `{F^n(g(s)) : s ∈ I_r}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridImage {
    pub points: u64,
    pub cardinality: u64,
    /// Values hit by more than one grid point.
    pub collided_values: u64,
    /// Grid points whose value is shared with another grid point.
    pub colliding_points: u64,
    pub max_multiplicity: u64,
}

/// Evaluates `F^n(g(s))` on every point of `I_r`, in grid order.
pub(crate) fn grid_images(
    system: &MapSpec,
    homeo: &MapSpec,
    n: u64,
    precision: u32,
) -> Result<Vec<Quad>> {
    let count = 1u64 << precision;
    (0..count)
        .into_par_iter()
        .map(|k| iterate(system, homeo, &Quad::dyadic(k, precision), n))
        .collect()
}

pub fn image_of_grid(
    system: &MapSpec,
    homeo: &MapSpec,
    n: u64,
    precision: u32,
    budget: &Budget,
) -> Result<GridImage> {
    budget.check_grid(precision, "grid image")?;
    let mut values = grid_images(system, homeo, n, precision)?;
    values.par_sort_unstable();
    let mut stats = GridImage {
        points: values.len() as u64,
        cardinality: 0,
        collided_values: 0,
        colliding_points: 0,
        max_multiplicity: 0,
    };
    for run in values.chunk_by(|a, b| a == b) {
        let m = run.len() as u64;
        stats.cardinality += 1;
        stats.max_multiplicity = stats.max_multiplicity.max(m);
        if m > 1 {
            stats.collided_values += 1;
            stats.colliding_points += m;
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn tent_collapses() {
        // oracle: enumerate k/16 by hand through two tent steps
        let oracle: BTreeSet<(i64, i64)> = (0..16i64)
            .map(|k| {
                let t1 = if 2 * k <= 16 { 2 * k } else { 32 - 2 * k }; // in 16ths
                let t2 = if 2 * t1 <= 16 { 2 * t1 } else { 32 - 2 * t1 };
                (t2, 16)
            })
            .collect();
        assert_eq!(oracle.len(), 5);
        let img = image_of_grid(&MapSpec::Tent, &MapSpec::Identity, 2, 4, &Budget::default()).unwrap();
        assert_eq!(img.cardinality, 5);
        assert_eq!(img.points, 16);
    }

    #[test]
    fn bijections_keep_cardinality() {
        let b = Budget::default();
        let sq = image_of_grid(&MapSpec::Squaring, &MapSpec::Identity, 2, 4, &b).unwrap();
        assert_eq!((sq.cardinality, sq.max_multiplicity), (16, 1));
        let id = image_of_grid(&MapSpec::Identity, &MapSpec::Identity, 7, 4, &b).unwrap();
        assert_eq!(id.cardinality, 16);
        assert_eq!(id.colliding_points, 0);
    }

    #[test]
    fn over_budget() {
        let err = image_of_grid(&MapSpec::Tent, &MapSpec::Identity, 1, 30, &Budget::new(20));
        assert!(err.unwrap_err().is_resource());
    }
}
