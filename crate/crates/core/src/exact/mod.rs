//! Exact arithmetic over dyadic rationals and the dyadic lattice of ℚ(√2).

mod dyadic;
mod interval;
mod parse;
mod quad;
mod scalar;
mod surd;

pub use dyadic::Dyadic;
pub use interval::IntervalSpec;
pub use parse::{format_number, parse_number, ParseError, ParseErrorKind};
pub use quad::Quad;
pub use scalar::Scalar;
pub use surd::Surd;

/// `κ = √2 − 1`, the default irrational rotation number.
pub fn default_kappa() -> Quad {
    Quad::sqrt2() - Quad::one()
}
