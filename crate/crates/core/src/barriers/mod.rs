//! Finite-scale certificates for the obstructions to reductions between
//! telic problems of different systems.

mod fixedpoint;
mod lemmas;
mod reduction;
mod semiconj;

pub use fixedpoint::{fixedpoint_report, FixedpointRow};
pub use lemmas::{
    cardinality_gap, check_small_preimage, level1_witness, perturb_witness, GapReport, PerturbReport,
    SmallPreimageReport,
};
pub use reduction::{
    check_reduction_family, dyadic_intervals, search_reduction_level, EntryVerdict, EtaEntry, EtaTable,
    Level, ReductionReport, ReductionSetup, SearchReport, Side, TargetFeasibility, Violation,
    SURROGATE_EXTRA_BITS,
};
pub use semiconj::{
    check_semiconjugacy, ConjugacyViolation, PeriodicCheck, Phi, PhiEntry, PhiTable, SemiconjugacyReport,
};
