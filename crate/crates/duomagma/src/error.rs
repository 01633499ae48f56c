//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element does not match the magma descriptor: {0}")]
    ShapeMismatch(String),
    #[error("unit law violated: {0}")]
    UnitLawViolation(String),
    #[error("unknown symbol `{0}` in table")]
    UnknownSymbol(String),
    #[error("bad breakpoints: {0}")]
    BadBreakpoints(String),
    #[error("bad interval: {0}")]
    BadInterval(String),
    #[error("map is not a unit-preserving homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("neighborhood does not contain the unit")]
    NotUnitNeighborhood,
    #[error("step function is not in HM0: value at 0 is not the unit")]
    NotInHM0,
    #[error("vector is not primitive: gcd of entries is {0}")]
    NotPrimitive(String),
    #[error("matrix is not invertible over the integers (det {0})")]
    NonInvertibleMatrix(String),
    #[error("no inverse: base magma is not a group ({0})")]
    NoInverse(String),
    #[error("search budget exhausted ({0})")]
    BudgetExhausted(String),
    #[error("dimension too small: {0}")]
    DimensionTooSmall(String),
    #[error("absorption search failed: {0}")]
    AbsorptionFailed(String),
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("instance too large for exhaustive oracle: {0}")]
    InstanceTooLarge(String),
    #[error("unknown instance kind `{0}`")]
    UnknownKind(String),
}

pub type Result<T> = std::result::Result<T, Error>;
