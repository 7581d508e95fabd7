use alloc::string::String;

use crate::model::{TestCase, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("input vector must have at least one value")]
    EmptyInput,
    #[error("arity mismatch: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("expected output contradicts a {verdict} verdict")]
    InconsistentLabel { verdict: Verdict },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("formula has arity {expected} but the test has arity {found}")]
    Dimension { expected: usize, found: usize },
    #[error("literal has no nonzero coefficient")]
    ZeroLiteral,
    #[error("parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubjectError {
    #[error("subject crashed (exit status {status:?}): {detail}")]
    Crash { status: Option<i32>, detail: String },
    #[error("subject timed out")]
    Timeout,
    #[error("unparseable subject output: {0:?}")]
    OutputFormat(String),
    #[error("subject expects {expected} inputs, got {found}")]
    Arity { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LearnError {
    #[error("contradictory labels for test {point}")]
    Contradiction { point: TestCase },
    #[error("training suite is empty")]
    EmptySuite,
    #[error("training suite has no failing test")]
    NoFailing,
    #[error("training suite mixes arities {expected} and {found}")]
    Arity { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FuzzError {
    #[error("cannot select from an empty set of failing tests")]
    EmptySelection,
    #[error(transparent)]
    Subject(#[from] SubjectError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("validation suite is empty")]
    EmptySuite,
    #[error("validation suite has no failing test")]
    NoFailing,
    #[error("validation suite has no passing test")]
    NoPassing,
    #[error("event log is empty")]
    EmptyLog,
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Subject(SubjectError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error("the human labeled the seed as passing; a failing seed is required")]
    SeedNotFailing,
    #[error("session aborted: {0}")]
    Aborted(String),
    #[error("seed execution failed: {0}")]
    Seed(SubjectError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}
