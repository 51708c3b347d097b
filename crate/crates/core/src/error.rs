use thiserror::Error;

/// Errors raised when inputs violate an operation's contract.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain must contain at least one element")]
    EmptyDomain,
    #[error("transformation {transform}: image of {x} is {value}, outside [0, {size})")]
    Range {
        transform: usize,
        x: usize,
        value: usize,
        size: usize,
    },
    #[error("transformation {transform} has length {len}, expected {size}")]
    TransformLength { transform: usize, len: usize, size: usize },
    #[error("transformations {i} and {j} do not commute at x = {x}")]
    NotCommuting { i: usize, j: usize, x: usize },
    #[error("function has {len} values, domain has {size} elements")]
    FunctionLength { len: usize, size: usize },
    #[error("expected {expected} exponents, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("element {x} outside domain of size {size}")]
    Element { x: usize, size: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal contract violation: {0}")]
    InternalContract(String),
    #[error("no relation found within exponent bound {bound}")]
    BoundExhausted { bound: usize },
    #[error("invalid rational literal {0:?}")]
    ParseRational(String),
    #[error("malformed shifts: {0}")]
    Shifts(String),
    #[error("invalid lattice window: {0}")]
    Window(String),
}

pub type Result<T> = std::result::Result<T, Error>;
