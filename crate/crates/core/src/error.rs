use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("variable tables differ")]
    VarTableMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("zero polynomial has no content")]
    ZeroPolynomial,
    #[error("polynomial is not homogeneous of degree {0} in the pencil variables")]
    NotHomogeneous(u32),
    #[error("leading coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error("all Macaulay orderings give a vanishing extraneous minor")]
    ResultantDegenerate,
    #[error("linear conditions have only the zero solution")]
    NullspaceEmpty,
    #[error("interpolation inconclusive: nullspace dimension {dimension}")]
    InterpolationInconclusive { dimension: usize },
    #[error("no method available: {0}")]
    NoMethodAvailable(String),
    #[error("configuration is defective")]
    Defective,
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("symbolic expansion bound {bound} exceeds cap {cap}")]
    SymbolicCapExceeded { bound: u128, cap: u128 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
