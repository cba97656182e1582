use crate::error::{Error, Result};

/// Largest grid (as a power of two) an exhaustive enumeration may touch.
pub const DEFAULT_MAX_GRID_BITS: u32 = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_grid_bits: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_grid_bits: DEFAULT_MAX_GRID_BITS,
        }
    }
}

impl Budget {
    pub fn new(max_grid_bits: u32) -> Self {
        Budget { max_grid_bits }
    }

    pub fn check_grid(&self, bits: u32, what: &str) -> Result<()> {
        if bits > self.max_grid_bits {
            return Err(Error::Resource(format!(
                "{what} needs 2^{bits} grid points, budget is 2^{}",
                self.max_grid_bits
            )));
        }
        Ok(())
    }

    /// Checks a product of work items against the same budget, measured in points.
    pub fn check_work(&self, work: u128, what: &str) -> Result<()> {
        let limit = 1u128 << (self.max_grid_bits + 8);
        if work > limit {
            return Err(Error::Resource(format!(
                "{what} needs {work} exact evaluations, budget is {limit}"
            )));
        }
        Ok(())
    }
}
