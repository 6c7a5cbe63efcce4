//! Error type shared by every module.

use alloc::string::String;

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("cannot parse rational `{0}`")]
    ParseRational(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid candidate name `{0}`")]
    InvalidCandidate(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid weight scheme: {0}")]
    InvalidWeights(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("ballot {index} has {len} names but the method allows at most {cap}")]
    BallotTooLong { index: usize, len: usize, cap: usize },
    #[error("method expects {expected} ballots but the profile has {found} ballots")]
    BallotKind { expected: &'static str, found: &'static str },
    #[error("fewer candidates ({candidates}) than seats ({seats})")]
    InsufficientCandidates { candidates: usize, seats: usize },
    #[error("Adams method is undefined with {parties} supported parties and only {seats} seats")]
    AdamsIllDefined { parties: usize, seats: usize },
    #[error("enumeration of {needed} committees exceeds the budget of {budget}")]
    EnumerationBudget { needed: u128, budget: u128 },
    #[error("outcome set was truncated at the branch cap; the question cannot be decided")]
    Truncated,
    #[error("scenario {scenario} does not apply to {what}")]
    ScenarioMismatch { scenario: &'static str, what: &'static str },
    #[error("no threshold is known for {0}")]
    NotApplicable(String),
    #[error("sequence index {n} exceeds the configured limit {limit}")]
    SequenceLimit { n: usize, limit: usize },
    #[error("linear program is {0}")]
    LinearProgram(&'static str),
    #[error("{0}")]
    Unsupported(String),
    #[error("search budget exhausted after {0} profiles")]
    SearchBudget(u64),
}
