//! Core types and algorithms for learning bug oracles with a human in the loop.
//!
//! A session starts from one failing test of a program under test. Tests are
//! produced by mutating failing inputs, a committee of look-ahead oracles
//! decides which of them are worth asking a human about, and an oracle is
//! learned from the labeled suite as a disjunction of conjunctions of linear
//! constraints over the inputs and the observed output.
//!
//! The crate is `no_std` (it needs `alloc`); process execution, file formats
//! and the command line live in the companion `bugoracle` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod bits;
pub mod committee;
pub mod error;
pub mod formula;
pub mod fuzz;
pub mod human;
pub mod learn;
pub mod metrics;
pub mod model;
pub mod number;
pub mod rng;
pub mod session;
pub mod subject;
pub mod text;

pub use committee::{decide2label, CommitteeDecision, MAX_REDRAWS};
pub use error::{
    FormulaError, FuzzError, LearnError, MetricError, ModelError, SessionError, SubjectError,
};
pub use formula::{evaluate_formula, Formula, LinearLiteral, Relation, Term};
pub use fuzz::{fuzz, MutationOp};
pub use human::{HumanError, HumanOracle, Query, SimulatedHumanOracle};
pub use learn::{smt_learn, LearnedOracle, Learner, LearnerBudget, Provenance, SearchLearner};
pub use metrics::{
    conditional_accuracy, effort_metrics, prediction_accuracy, validation_score, EffortMetrics,
    ValidationSuite,
};
pub use model::{
    InputVector, Label, LabeledTest, MutationConfig, SessionConfig, Source, TestCase, Verdict,
};
pub use number::Rational;
pub use rng::SessionRng;
pub use session::{
    run_session, ActiveLoop, Clock, GenerationEvent, SessionCounts, SessionObserver,
    SessionResult, Termination,
};
pub use subject::{Builtin, Subject};
pub use text::{formula_to_text, text_to_formula};
