use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cover relation contains a cycle through element {0}")]
    Cycle(usize),
    #[error("cover pair ({0}, {1}) is implied by transitivity")]
    RedundantCover(usize, usize),
    #[error("element {element} out of range for a poset of {len} elements")]
    Range { element: usize, len: usize },
    #[error("{what}: size {size} exceeds the limit of {limit}")]
    Size {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("{0} is undefined for this input")]
    Undefined(&'static str),
    #[error("element set is empty")]
    EmptySet,
    #[error("element {0} is covered by more than one element; the poset is not forest-like")]
    NotForest(usize),
    #[error("promise violated: {0}")]
    PromiseViolation(String),
    #[error("recursive search condition violated: {0}")]
    ConditionViolation(String),
    #[error("oracle answers are inconsistent with every candidate")]
    InconsistentOracle,
    #[error("input list is not sorted in ascending order at index {0}")]
    UnsortedInput(usize),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("query budget of {0} exceeded")]
    Budget(u64),
}

impl Error {
    /// Promise and condition violations are reported separately by the CLI.
    pub fn is_violation(&self) -> bool {
        matches!(
            self,
            Error::PromiseViolation(_) | Error::ConditionViolation(_) | Error::InconsistentOracle
        )
    }
}
