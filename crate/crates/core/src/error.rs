use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `+∞ + (−∞)` or `+∞ − (+∞)` was requested.
    #[error("indeterminate extended-real operation: {0}")]
    Indeterminate(&'static str),
    #[error("NaN is not an extended real")]
    NotANumber,
    #[error("invalid bracket: {0}")]
    InvalidBracket(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("finite-difference stencil leaves the domain interior along coordinate {coordinate}")]
    StencilOutsideDomain { coordinate: usize },
    #[error("unknown kernel `{0}`")]
    UnknownKernel(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("prox undefined outside int dom κ: {0:?}")]
    ProxUndefined(Vec<f64>),
    #[error("point {0:?} is outside dom κ")]
    OutsideDomain(Vec<f64>),
    #[error("kernel `{kernel}` lacks required property: {property}")]
    KernelProperty { kernel: String, property: &'static str },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("improper function: {0}")]
    Improper(&'static str),
    #[error("constraint solve failed: {0}")]
    ConstraintSolve(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
