use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::{periodic_points, MapSpec, PeriodicPoints};
use crate::error::{Error, Result};
use crate::exact::{Quad, Surd};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiEntry {
    pub x: Quad,
    pub fx: Quad,
}

/// A sampled map `φ`, one image per sample point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<PhiEntry>", into = "Vec<PhiEntry>")]
pub struct PhiTable {
    entries: Vec<PhiEntry>,
    index: HashMap<Quad, usize>,
}

impl TryFrom<Vec<PhiEntry>> for PhiTable {
    type Error = Error;
    fn try_from(entries: Vec<PhiEntry>) -> Result<Self> {
        PhiTable::new(entries)
    }
}

impl From<PhiTable> for Vec<PhiEntry> {
    fn from(t: PhiTable) -> Self {
        t.entries
    }
}

impl PhiTable {
    pub fn new(entries: Vec<PhiEntry>) -> Result<Self> {
        let unit = |v: &Quad| !v.is_negative() && *v <= Quad::one();
        let mut index = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if !unit(&e.x) || !unit(&e.fx) {
                return Err(Error::Validation(format!("phi entry {} -> {} leaves [0, 1]", e.x, e.fx)));
            }
            if index.insert(e.x.clone(), i).is_some() {
                return Err(Error::Validation(format!("phi is sampled twice at {}", e.x)));
            }
        }
        Ok(PhiTable { entries, index })
    }

    /// The table of `map` on the given samples.
    pub fn from_map(map: &MapSpec, samples: impl IntoIterator<Item = Quad>) -> Result<Self> {
        let entries = samples
            .into_iter()
            .map(|x| Ok(PhiEntry { fx: map.eval(&x)?, x }))
            .collect::<Result<_>>()?;
        PhiTable::new(entries)
    }

    pub fn entries(&self) -> &[PhiEntry] {
        &self.entries
    }

    pub fn get(&self, x: &Quad) -> Option<&Quad> {
        self.index.get(x).map(|&i| &self.entries[i].fx)
    }
}

/// A semiconjugacy candidate: a finite table closed under `T`, or a map
/// evaluated exactly at arbitrary samples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Phi {
    Table { entries: PhiTable },
    Map { map: MapSpec, samples: Vec<Quad> },
}

impl Phi {
    fn samples(&self) -> Vec<Quad> {
        match self {
            Phi::Table { entries } => entries.entries().iter().map(|e| e.x.clone()).collect(),
            Phi::Map { samples, .. } => samples.clone(),
        }
    }

    fn at(&self, x: &Quad) -> Result<Option<Quad>> {
        match self {
            Phi::Table { entries } => Ok(entries.get(x).cloned()),
            Phi::Map { map, .. } => map.eval(x).map(Some),
        }
    }

    fn at_surd(&self, x: &Surd) -> Result<Option<Surd>> {
        match self {
            Phi::Table { entries } => Ok(x.to_quad().and_then(|q| entries.get(&q)).map(Surd::from)),
            Phi::Map { map, .. } => map.eval(x).map(Some),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugacyViolation {
    pub x: Quad,
    /// `φ(T(x))`.
    pub phi_tx: Quad,
    /// `S(φ(x))`.
    pub s_phix: Quad,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicCheck {
    pub period: u32,
    /// Period points of `T` (or samples, when every point is periodic).
    pub points: u64,
    /// Points at which `φ` could be evaluated.
    pub checked: u64,
    /// Periodic points whose image is not periodic under `S`.
    pub failures: Vec<Surd>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemiconjugacyReport {
    pub holds: bool,
    pub samples: u64,
    pub violations: Vec<ConjugacyViolation>,
    pub periodic: Vec<PeriodicCheck>,
}

/// Checks `φ ∘ T = S ∘ φ` on every sample and `φ(Per_p(T)) ⊆ Per_p(S)` for
/// each requested period.
pub fn check_semiconjugacy(phi: &Phi, t: &MapSpec, s: &MapSpec, periods: &[u32]) -> Result<SemiconjugacyReport> {
    let samples = phi.samples();
    if let Phi::Table { entries } = phi {
        let mut missing = Vec::new();
        for x in &samples {
            let tx = t.eval(x)?;
            if entries.get(&tx).is_none() && !missing.contains(&tx) {
                missing.push(tx);
            }
        }
        if !missing.is_empty() {
            let list: Vec<String> = missing.iter().map(Quad::to_string).collect();
            return Err(Error::Validation(format!(
                "phi samples are not closed under {t}; missing {}",
                list.join(", ")
            )));
        }
    }

    let mut violations = Vec::new();
    for x in &samples {
        let fx = phi.at(x)?.expect("sample has an image");
        let phi_tx = phi.at(&t.eval(x)?)?.expect("closure checked");
        let s_phix = s.eval(&fx)?;
        if phi_tx != s_phix {
            violations.push(ConjugacyViolation {
                x: x.clone(),
                phi_tx,
                s_phix,
            });
        }
    }

    let mut periodic = Vec::new();
    for &p in periods {
        let points: Vec<Surd> = match periodic_points(t, p)? {
            PeriodicPoints::All => samples.iter().map(Surd::from).collect(),
            PeriodicPoints::Finite(v) => v,
        };
        let mut checked = 0;
        let mut failures = Vec::new();
        for x in &points {
            let Some(y) = phi.at_surd(x)? else { continue };
            checked += 1;
            if s.eval_n(&y, u64::from(p))? != y {
                failures.push(x.clone());
            }
        }
        periodic.push(PeriodicCheck {
            period: p,
            points: points.len() as u64,
            checked,
            failures,
        });
    }

    Ok(SemiconjugacyReport {
        holds: violations.is_empty() && periodic.iter().all(|c| c.failures.is_empty()),
        samples: samples.len() as u64,
        violations,
        periodic,
    })
}
