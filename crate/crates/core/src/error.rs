use thiserror::Error;

use crate::exact::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{value} is outside the domain of {map}")]
    Domain { map: String, value: String },
    #[error("out of range: {0}")]
    Range(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("resource budget exceeded: {0}")]
    Resource(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("machine fault: {0}")]
    Machine(String),
}

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_))
    }
}
