//! Exact-arithmetic toolkit for telic problems: reachability questions over
//! interval dynamical systems whose certificates are dyadic grid points.

pub mod barriers;
pub mod bssvm;
pub mod budget;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod solvers;
pub mod telic;

pub use budget::Budget;
pub use error::{Error, Result};
