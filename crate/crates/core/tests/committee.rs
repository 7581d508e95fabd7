use std::cell::RefCell;

use bugoracle_core::learn::{examples_of, Example};
use bugoracle_core::number::int;
use bugoracle_core::subject::run_subject;
use bugoracle_core::{
    decide2label, smt_learn, Builtin, CommitteeDecision, Formula, InputVector, Label, LabeledTest,
    LearnError, LearnedOracle, Learner, LearnerBudget, MutationConfig, Provenance, Rational,
    SearchLearner, SessionRng, Source, TestCase, Verdict,
};
use num_bigint::BigInt;

fn buggy(v: &[i64]) -> TestCase {
    run_subject(&Builtin::TriangleSteve, &InputVector::from_ints(v).unwrap()).unwrap()
}

fn suite() -> Vec<LabeledTest> {
    vec![
        LabeledTest::new(buggy(&[2, 2, 2]), Label::failing().with_expected(int(1)), Source::Seed).unwrap(),
        LabeledTest::new(buggy(&[2, 3, 4]), Label::passing(), Source::Human).unwrap(),
        LabeledTest::new(buggy(&[5, 5, 3]), Label::passing(), Source::Human).unwrap(),
    ]
}

/// One learner call: the training inputs and verdicts it saw.
type Call = Vec<(TestCase, Verdict)>;

/// Wraps a learner and records every training set it is given.
struct Recording<L> {
    inner: L,
    calls: RefCell<Vec<Call>>,
}

impl<L> Recording<L> {
    fn new(inner: L) -> Self {
        Self {
            inner,
            calls: RefCell::new(Vec::new()),
        }
    }
}

impl<L: Learner> Learner for Recording<L> {
    fn learn(&self, examples: &[Example<'_>]) -> Result<LearnedOracle, LearnError> {
        self.learn_sample(examples, 0)
    }

    fn learn_sample(&self, examples: &[Example<'_>], seed: u64) -> Result<LearnedOracle, LearnError> {
        self.calls
            .borrow_mut()
            .push(examples.iter().map(|e| (e.test.clone(), e.verdict)).collect());
        self.inner.learn_sample(examples, seed)
    }
}

/// Always answers with the same formula, whatever the data.
struct Constant(Formula);

impl Learner for Constant {
    fn learn(&self, _examples: &[Example<'_>]) -> Result<LearnedOracle, LearnError> {
        // consistency is not the point here, so check against nothing
        Ok(LearnedOracle::checked(self.0.clone(), &[], Provenance::Searched)
            .unwrap()
            .unwrap())
    }
}

fn decide<L: Learner>(query: &TestCase, suite: &[LabeledTest], s: usize, learner: &L, seed: u64) -> CommitteeDecision {
    let current = smt_learn(suite, &LearnerBudget::default()).unwrap();
    let mut rng = SessionRng::seeded(seed);
    decide2label(
        query,
        &current,
        suite,
        s,
        &Builtin::TriangleSteve,
        &MutationConfig::default(),
        learner,
        &mut rng,
    )
    .unwrap()
}

fn q(n: u32, d: u32) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn every_member_sees_the_suite_plus_one_neighbour_under_both_labels() {
    let suite = suite();
    let query = buggy(&[3, 3, 1]);
    let learner = Recording::new(SearchLearner::new(LearnerBudget::default().for_committee()));
    let d = decide(&query, &suite, 10, &learner, 4);
    assert!(!d.shortcut);
    let calls = learner.calls.borrow();
    assert_eq!(calls.len(), 2 * d.members as usize);
    let base: Call = examples_of(&suite).iter().map(|e| (e.test.clone(), e.verdict)).collect();
    for pair in calls.chunks(2) {
        let (pass, fail) = (&pair[0], &pair[1]);
        for call in [pass, fail] {
            assert_eq!(call.len(), suite.len() + 1);
            assert_eq!(call[..suite.len()], base[..]);
        }
        let (probe_p, verdict_p) = pass.last().unwrap();
        let (probe_f, verdict_f) = fail.last().unwrap();
        // the same hypothetical point, once under each label
        assert_eq!(probe_p, probe_f);
        assert_eq!(*verdict_p, Verdict::Passing);
        assert_eq!(*verdict_f, Verdict::Failing);
        assert!(suite.iter().all(|t| t.test.input != probe_p.input));
        assert_eq!(run_subject(&Builtin::TriangleSteve, &probe_p.input).unwrap(), *probe_p);
    }
}

#[test]
fn theta_hat_is_votes_over_twice_the_members() {
    let suite = suite();
    for (i, v) in [[1, 1, 1], [3, 3, 1], [4, 4, 4], [7, 1, 3]].iter().enumerate() {
        let learner = SearchLearner::new(LearnerBudget::default().for_committee());
        let d = decide(&buggy(v), &suite, 8, &learner, i as u64);
        if d.shortcut {
            assert!(d.send_to_human);
            continue;
        }
        let votes: u32 = d.member_votes.iter().map(|&(p, f)| p as u32 + f as u32).sum();
        assert_eq!(d.votes, Some(votes));
        assert_eq!(d.members as usize, d.member_votes.len());
        assert_eq!(d.members + d.abstained, 8);
        let theta = q(votes, 2 * d.members);
        assert_eq!(d.theta_hat, Some(theta.clone()));
        assert_eq!(d.send_to_human, theta >= q(1, 2));
    }
}

#[test]
fn unanimous_committees() {
    let suite = suite();
    let query = buggy(&[3, 3, 1]);
    let yes = decide(&query, &suite, 5, &Constant(Formula::True), 1);
    assert_eq!((yes.votes, yes.theta_hat.clone()), (Some(10), Some(q(1, 1))));
    assert!(yes.send_to_human);
    let no = decide(&query, &suite, 5, &Constant(Formula::False), 1);
    assert_eq!((no.votes, no.theta_hat.clone()), (Some(0), Some(q(0, 1))));
    assert!(!no.send_to_human);
}

#[test]
fn tests_the_oracle_calls_failing_skip_the_committee() {
    let seed_only = vec![suite().remove(0)];
    let learner = Recording::new(SearchLearner::default());
    // the seed alone learns `true`, so everything is sent directly
    let d = decide(&buggy(&[9, 1, 4]), &seed_only, 10, &learner, 0);
    assert!(d.shortcut && d.send_to_human);
    assert_eq!(d.votes, None);
    assert!(learner.calls.borrow().is_empty());
}

#[test]
fn decisions_are_reproducible() {
    let suite = suite();
    let query = buggy(&[3, 3, 1]);
    let learner = SearchLearner::new(LearnerBudget::default().for_committee());
    let a = decide(&query, &suite, 10, &learner, 77);
    let b = decide(&query, &suite, 10, &learner, 77);
    assert_eq!(a, b);
}
