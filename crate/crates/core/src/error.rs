use thiserror::Error;

/// Errors raised by the algebra engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("prime {0} exceeds the supported bound {max}", max = crate::gfp::MAX_PRIME)]
    PrimeTooLarge(u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("truncation too small: {0}")]
    Truncation(String),
    #[error("operator is not central over the depth-{depth} twist subring")]
    NotCentral { depth: u32 },
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("degree {0} outside the complex")]
    DegreeOutOfRange(i64),
    #[error("missing product: {0}")]
    MissingProduct(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
