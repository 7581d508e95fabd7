//! The active oracle-learning loop.
//!
//! Starting from one failing test, the loop repeatedly picks a failing test,
//! fuzzes it, asks the committee whether the result deserves a human label,
//! and retrains the automatic oracle after every new label. It stops when the
//! labeled suite reaches the budget `l` or the clock runs out.

use alloc::format;
use alloc::vec::Vec;
use core::time::Duration;

use crate::committee::{decide2label, CommitteeDecision};
use crate::error::SessionError;
use crate::fuzz::{fuzz, select};
use crate::human::{HumanError, HumanOracle, Query};
use crate::learn::{examples_of, LearnedOracle, Learner, SearchLearner};
use crate::model::{InputVector, Label, LabeledTest, SessionConfig, Source, TestCase, Verdict};
use crate::rng::SessionRng;
use crate::subject::{run_subject, Subject};

/// Time elapsed since the session started.
pub trait Clock {
    fn elapsed(&self) -> Duration;
}

/// A clock that never advances; only a zero timeout ever expires.
#[derive(Clone, Copy, Debug, Default)]
pub struct FrozenClock;

impl Clock for FrozenClock {
    fn elapsed(&self) -> Duration {
        Duration::ZERO
    }
}

/// Hooks for live progress reporting.
pub trait SessionObserver {
    fn on_event(&mut self, _event: &GenerationEvent) {}
    fn on_oracle(&mut self, _suite: &[LabeledTest], _oracle: &LearnedOracle) {}
}

/// One generated test and what happened to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationEvent {
    /// 1-based count of generated (non-duplicate) tests.
    pub iter: usize,
    /// Suite index of the failing test this one was fuzzed from.
    pub parent: usize,
    pub test: TestCase,
    pub decision: CommitteeDecision,
    /// A human query was actually issued.
    pub queried: bool,
    pub label: Option<Label>,
    /// Suite index assigned when the label was added.
    pub suite_index: Option<usize>,
    /// Verdict of the reference version, when one was supplied.
    pub truth: Option<Verdict>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    Budget,
    Timeout,
    /// The human channel closed before the budget was used up.
    HumanClosed,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Budget => "budget",
            Termination::Timeout => "timeout",
            Termination::HumanClosed => "human-closed",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SessionCounts {
    /// Generated tests after dropping duplicates of labeled points.
    pub generated: usize,
    /// Tests `decide2label` chose to send.
    pub decided: usize,
    /// Queries issued to the human (excluding seed confirmation).
    pub queries: usize,
    pub labeled: usize,
    pub labeled_failing: usize,
    pub duplicates: usize,
    /// Queries the human could not answer.
    pub discarded: usize,
    pub subject_errors: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionResult {
    pub suite: Vec<LabeledTest>,
    pub oracle: LearnedOracle,
    pub counts: SessionCounts,
    pub termination: Termination,
    pub events: Vec<GenerationEvent>,
}

/// Builder for one session.
pub struct ActiveLoop<'a> {
    config: &'a SessionConfig,
    subject: &'a dyn Subject,
    clock: &'a dyn Clock,
    reference: Option<&'a dyn Subject>,
    observer: Option<&'a mut dyn SessionObserver>,
    learner: Option<&'a dyn Learner>,
    committee_learner: Option<&'a dyn Learner>,
}

impl<'a> ActiveLoop<'a> {
    pub fn new(config: &'a SessionConfig, subject: &'a dyn Subject) -> Self {
        Self {
            config,
            subject,
            clock: &FrozenClock,
            reference: None,
            observer: None,
            learner: None,
            committee_learner: None,
        }
    }

    pub fn clock(mut self, clock: &'a dyn Clock) -> Self {
        self.clock = clock;
        self
    }

    /// A correct version that records ground truth in the event log and
    /// supplies the seed's expected output when the seed is not confirmed.
    pub fn reference(mut self, golden: &'a dyn Subject) -> Self {
        self.reference = Some(golden);
        self
    }

    pub fn observer(mut self, observer: &'a mut dyn SessionObserver) -> Self {
        self.observer = Some(observer);
        self
    }

    pub fn learners(mut self, main: &'a dyn Learner, committee: &'a dyn Learner) -> Self {
        self.learner = Some(main);
        self.committee_learner = Some(committee);
        self
    }

    pub fn run(
        mut self,
        seed_input: InputVector,
        human: &mut dyn HumanOracle,
    ) -> Result<SessionResult, SessionError> {
        let config = self.config;
        if seed_input.arity() != config.arity {
            return Err(crate::error::ModelError::Arity {
                expected: config.arity,
                found: seed_input.arity(),
            }
            .into());
        }
        let default_main;
        let default_committee;
        let learner: &dyn Learner = match self.learner {
            Some(l) => l,
            None => {
                default_main = SearchLearner::new(config.learner.clone());
                &default_main
            }
        };
        let committee_learner: &dyn Learner = match self.committee_learner {
            Some(l) => l,
            None => {
                default_committee = SearchLearner::new(config.learner.for_committee());
                &default_committee
            }
        };
        let subject = self.subject;
        let timed_out = |clock: &dyn Clock| clock.elapsed() >= config.loop_timeout;
        let mut rng = SessionRng::seeded(config.rng_seed);

        let seed = run_subject(subject, &seed_input).map_err(SessionError::Seed)?;
        let seed_label = if config.confirm_seed {
            let label = human
                .label(&Query {
                    id: 0,
                    test: seed.clone(),
                })
                .map_err(|e| SessionError::Aborted(format!("{e}")))?;
            if !label.verdict.is_failing() {
                return Err(SessionError::SeedNotFailing);
            }
            label
        } else {
            // the reference version, when known, supplies the seed's expected output
            match self.reference.map(|golden| run_subject(golden, &seed_input)) {
                Some(Ok(g)) if g.output != seed.output => Label::failing().with_expected(g.output),
                _ => Label::failing(),
            }
        };
        let mut suite = alloc::vec![LabeledTest::new(seed, seed_label, Source::Seed)?];
        let mut failing: Vec<usize> = alloc::vec![0];
        let mut oracle = learner.learn(&examples_of(&suite))?;
        if let Some(obs) = self.observer.as_deref_mut() {
            obs.on_oracle(&suite, &oracle);
        }

        let mut counts = SessionCounts::default();
        let mut events = Vec::new();
        let mut next_query = 1u64;
        let mut consecutive_errors = 0usize;
        let source = human.source();

        let termination = loop {
            if suite.len() >= config.budget_l {
                break Termination::Budget;
            }
            if timed_out(self.clock) {
                break Termination::Timeout;
            }
            let parent = *select(&failing, &mut rng).map_err(|e| SessionError::Aborted(format!("{e}")))?;
            let candidate = match fuzz(&suite[parent].test, subject, &config.mutation, &mut rng) {
                Ok(t) => t,
                Err(_) => {
                    counts.subject_errors += 1;
                    consecutive_errors += 1;
                    if consecutive_errors >= config.max_subject_errors {
                        return Err(SessionError::Aborted(format!(
                            "{consecutive_errors} consecutive subject errors"
                        )));
                    }
                    continue;
                }
            };
            consecutive_errors = 0;
            if suite.iter().any(|t| t.test.input == candidate.input) {
                counts.duplicates += 1;
                continue;
            }
            counts.generated += 1;
            let truth = self.reference.and_then(|golden| {
                run_subject(golden, &candidate.input)
                    .ok()
                    .map(|g| Verdict::from_failing(g.output != candidate.output))
            });
            let decision = decide2label(
                &candidate,
                &oracle,
                &suite,
                config.committee_s,
                subject,
                &config.mutation,
                committee_learner,
                &mut rng,
            )?;
            let mut event = GenerationEvent {
                iter: counts.generated,
                parent,
                test: candidate,
                decision,
                queried: false,
                label: None,
                suite_index: None,
                truth,
            };
            let mut stop = None;
            if event.decision.send_to_human {
                counts.decided += 1;
                if timed_out(self.clock) {
                    stop = Some(Termination::Timeout);
                } else {
                    let query = Query {
                        id: next_query,
                        test: event.test.clone(),
                    };
                    next_query += 1;
                    counts.queries += 1;
                    event.queried = true;
                    match human.label(&query) {
                        Ok(label) => {
                            let labeled = LabeledTest::new(event.test.clone(), label.clone(), source)?;
                            let index = suite.len();
                            if labeled.is_failing() {
                                failing.push(index);
                                counts.labeled_failing += 1;
                            }
                            suite.push(labeled);
                            counts.labeled += 1;
                            oracle = learner.learn(&examples_of(&suite))?;
                            event.label = Some(label);
                            event.suite_index = Some(index);
                            if let Some(obs) = self.observer.as_deref_mut() {
                                obs.on_oracle(&suite, &oracle);
                            }
                        }
                        Err(HumanError::Unavailable(_)) => counts.discarded += 1,
                        Err(HumanError::Closed(_)) => stop = Some(Termination::HumanClosed),
                    }
                }
            }
            if let Some(obs) = self.observer.as_deref_mut() {
                obs.on_event(&event);
            }
            events.push(event);
            if let Some(reason) = stop {
                break reason;
            }
        };

        Ok(SessionResult {
            suite,
            oracle,
            counts,
            termination,
            events,
        })
    }
}

/// Runs one session with the default learners and no reference version.
pub fn run_session(
    config: &SessionConfig,
    subject: &dyn Subject,
    seed_input: InputVector,
    human: &mut dyn HumanOracle,
) -> Result<SessionResult, SessionError> {
    ActiveLoop::new(config, subject).run(seed_input, human)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;
    use crate::human::SimulatedHumanOracle;
    use crate::subject::Builtin;

    fn config(l: usize, seed: u64) -> SessionConfig {
        let mut c = SessionConfig::new(3);
        c.budget_l = l;
        c.rng_seed = seed;
        c
    }

    fn seed() -> InputVector {
        InputVector::from_ints(&[2, 2, 2]).unwrap()
    }

    #[test]
    fn budget_one_never_queries() {
        let mut human = SimulatedHumanOracle::new(Builtin::TriangleGolden);
        let r = run_session(&config(1, 0), &Builtin::TriangleSteve, seed(), &mut human).unwrap();
        assert_eq!(r.suite.len(), 1);
        assert_eq!(r.oracle.formula(), &Formula::True);
        assert_eq!(r.termination, Termination::Budget);
        assert_eq!(human.queries(), 0);
        assert!(r.events.is_empty());
    }

    #[test]
    fn zero_timeout_returns_immediately() {
        let mut c = config(20, 0);
        c.loop_timeout = Duration::ZERO;
        let mut human = SimulatedHumanOracle::new(Builtin::TriangleGolden);
        let r = run_session(&c, &Builtin::TriangleSteve, seed(), &mut human).unwrap();
        assert_eq!(r.termination, Termination::Timeout);
        assert_eq!(r.oracle.formula(), &Formula::True);
        assert_eq!(human.queries(), 0);
    }

    #[test]
    fn seed_must_fail_when_confirmed() {
        let mut c = config(5, 0);
        c.confirm_seed = true;
        let mut human = SimulatedHumanOracle::new(Builtin::TriangleGolden);
        let passing_seed = InputVector::from_ints(&[3, 4, 5]).unwrap();
        assert_eq!(
            run_session(&c, &Builtin::TriangleSteve, passing_seed, &mut human),
            Err(SessionError::SeedNotFailing)
        );
    }

    #[test]
    fn wrong_seed_arity() {
        let mut human = SimulatedHumanOracle::new(Builtin::TriangleGolden);
        let bad = InputVector::from_ints(&[2, 2]).unwrap();
        assert!(run_session(&config(5, 0), &Builtin::TriangleSteve, bad, &mut human).is_err());
    }
}
