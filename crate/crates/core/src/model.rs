//! Tests, labels and session configuration.

use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use crate::error::ModelError;
use crate::number::{format_numbers, format_number, Rational};

/// Fixed-arity vector of exact input values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputVector(Vec<Rational>);

impl InputVector {
    pub fn new(values: Vec<Rational>) -> Result<Self, ModelError> {
        if values.is_empty() {
            return Err(ModelError::EmptyInput);
        }
        Ok(Self(values))
    }

    pub fn from_ints(values: &[i64]) -> Result<Self, ModelError> {
        Self::new(crate::number::ints(values))
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.0
    }
}

impl fmt::Display for InputVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_numbers(&self.0))
    }
}

/// An input paired with the actual output the program produced for it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TestCase {
    pub input: InputVector,
    pub output: Rational,
}

impl TestCase {
    pub fn new(input: InputVector, output: Rational) -> Self {
        Self { input, output }
    }

    pub fn arity(&self) -> usize {
        self.input.arity()
    }

    /// The point `input ∥ output` that formulas are evaluated at.
    pub fn point(&self) -> impl Iterator<Item = &Rational> + '_ {
        self.input.values().iter().chain(core::iter::once(&self.output))
    }
}

impl fmt::Display for TestCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<({}), {}>", self.input, format_number(&self.output))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Passing,
    Failing,
}

impl Verdict {
    pub fn is_failing(self) -> bool {
        self == Verdict::Failing
    }

    pub fn from_failing(failing: bool) -> Self {
        if failing {
            Verdict::Failing
        } else {
            Verdict::Passing
        }
    }

    pub fn flipped(self) -> Self {
        Self::from_failing(!self.is_failing())
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Passing => "pass",
            Verdict::Failing => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Label {
    pub verdict: Verdict,
    pub expected_output: Option<Rational>,
}

impl Label {
    pub fn passing() -> Self {
        Self {
            verdict: Verdict::Passing,
            expected_output: None,
        }
    }

    pub fn failing() -> Self {
        Self {
            verdict: Verdict::Failing,
            expected_output: None,
        }
    }

    pub fn with_expected(mut self, expected: Rational) -> Self {
        self.expected_output = Some(expected);
        self
    }

    /// Checks the expected-output invariants against the test's actual output.
    pub fn check(&self, test: &TestCase) -> Result<(), ModelError> {
        match (&self.expected_output, self.verdict) {
            (Some(e), Verdict::Failing) if *e == test.output => {
                Err(ModelError::InconsistentLabel { verdict: self.verdict })
            }
            (Some(e), Verdict::Passing) if *e != test.output => {
                Err(ModelError::InconsistentLabel { verdict: self.verdict })
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    Seed,
    Human,
    SimulatedGolden,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Seed => "seed",
            Source::Human => "human",
            Source::SimulatedGolden => "simulated-golden",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "seed" => Some(Source::Seed),
            "human" => Some(Source::Human),
            "simulated-golden" => Some(Source::SimulatedGolden),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledTest {
    pub test: TestCase,
    pub label: Label,
    pub source: Source,
}

impl LabeledTest {
    pub fn new(test: TestCase, label: Label, source: Source) -> Result<Self, ModelError> {
        label.check(&test)?;
        Ok(Self { test, label, source })
    }

    pub fn verdict(&self) -> Verdict {
        self.label.verdict
    }

    pub fn is_failing(&self) -> bool {
        self.label.verdict.is_failing()
    }
}

/// Knobs of the per-position mutation distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct MutationConfig {
    /// Probability that a position keeps its seed value.
    pub keep_prob: f64,
    /// Inclusive integer range for `random-replace`.
    pub random_range: (i64, i64),
    /// Truncate `div10` toward zero so inputs stay integral.
    pub integer_only: bool,
    /// Non-keep operators drawn uniformly when a position mutates.
    pub ops: Vec<crate::fuzz::MutationOp>,
}

impl Default for MutationConfig {
    fn default() -> Self {
        Self {
            keep_prob: 0.5,
            random_range: (-1000, 1000),
            integer_only: false,
            ops: crate::fuzz::MutationOp::NON_KEEP.to_vec(),
        }
    }
}

impl MutationConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(0.0..=1.0).contains(&self.keep_prob) {
            return Err(ModelError::InvalidConfig("mutation.keep_prob must lie in [0, 1]"));
        }
        if self.random_range.0 > self.random_range.1 {
            return Err(ModelError::InvalidConfig("mutation.random_range is empty"));
        }
        if self.keep_prob < 1.0 && self.ops.iter().all(|op| *op == crate::fuzz::MutationOp::Keep) {
            return Err(ModelError::InvalidConfig("mutation.ops has no mutating operator"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionConfig {
    /// Maximum size of the labeled suite, seed included.
    pub budget_l: usize,
    /// Half the committee size; `S` pairs of look-one-ahead oracles.
    pub committee_s: usize,
    pub loop_timeout: Duration,
    pub rng_seed: u64,
    pub arity: usize,
    pub mutation: MutationConfig,
    pub learner: crate::learn::LearnerBudget,
    /// Ask the human to confirm the seed before the loop (not counted in `l`).
    pub confirm_seed: bool,
    /// Give up after this many consecutive subject errors.
    pub max_subject_errors: usize,
}

impl SessionConfig {
    pub fn new(arity: usize) -> Self {
        Self {
            budget_l: 30,
            committee_s: 10,
            loop_timeout: Duration::from_secs(600),
            rng_seed: 0,
            arity,
            mutation: MutationConfig::default(),
            learner: crate::learn::LearnerBudget::default(),
            confirm_seed: false,
            max_subject_errors: 1000,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.budget_l == 0 {
            return Err(ModelError::InvalidConfig("budget_l must be at least 1"));
        }
        if self.committee_s == 0 {
            return Err(ModelError::InvalidConfig("committee_S must be at least 1"));
        }
        if self.arity == 0 {
            return Err(ModelError::EmptyInput);
        }
        self.learner.validate()?;
        self.mutation.validate()
    }
}
