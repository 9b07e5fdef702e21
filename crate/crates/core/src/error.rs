use thiserror::Error;

use crate::election::{CandidateId, Rule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("election has no votes")]
    EmptyElection,
    #[error("candidate {0} is not part of the election")]
    UnknownCandidate(CandidateId),
    #[error("level {level} is out of range 1..={max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("cannot restrict an election to an empty candidate set")]
    EmptyRestriction,
    #[error("election must have at least one candidate")]
    NoCandidates,
    #[error("vote {index} is malformed: {reason}")]
    MalformedVote { index: usize, reason: String },
    #[error("operation requires rule {expected}, election uses {found}")]
    WrongRule { expected: &'static str, found: Rule },
    #[error("operation is not defined for plurality elections")]
    PluralityUnsupported,
    #[error("unsupported control type: {0}")]
    UnsupportedControl(String),
    #[error("action does not match control type {0}")]
    ActionMismatch(String),
    #[error("action uses {used} elements but the budget is {budget}")]
    BudgetExceeded { used: usize, budget: usize },
    #[error("action refers to index {0} which is out of range")]
    IndexOutOfRange(usize),
    #[error("the distinguished candidate cannot be deleted")]
    DeletesDistinguished,
    #[error("malformed instance: {0}")]
    MalformedInstance(String),
    #[error("condition is only defined for {0}")]
    ConditionNotApplicable(&'static str),
    #[error("action space of {size} exceeds the oracle cap of {cap}")]
    OracleTooLarge { size: u128, cap: u128 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("control pair {0} was not part of the original experiments (use allow_unstudied)")]
    UnstudiedPair(String),
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Wrapper so `Error` can stay `Clone + PartialEq`.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("csv: {0}")]
pub struct CsvError(pub String);

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(CsvError(e.to_string()))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
