use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension {value} outside supported range {min}..={max} for {what}")]
    DimensionOutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },
    #[error("invalid face word {0:?}")]
    InvalidFaceWord(String),
    #[error("{facet} is not a facet of {face}")]
    NotAFacet { face: String, facet: String },
    #[error("flow graph has a cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("structural check failed: {0}")]
    Structural(String),
    #[error("slot binding error: {0}")]
    Binding(String),
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("size cap exceeded: {0}")]
    TooLarge(String),
    #[error("cube {cube} is not in the {side} chain")]
    NotInChain { cube: String, side: String },
    #[error("not a solution: {0}")]
    NotASolution(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
