//! Deciding whether a generated test is worth a human query.
//!
//! If the current oracle already labels the test failing it goes to the
//! human directly. Otherwise `S` neighbours of the test are fuzzed and each
//! is hypothetically labeled both passing and failing; one oracle is learned
//! per hypothesis, and every oracle that labels the original test failing
//! casts a vote. The test is sent when at least half of the votes say failing.
//!
//! Members are drawn with [`Learner::learn_sample`], so they are random
//! consistent oracles rather than copies of the current one. The session's
//! default committee learner uses half-space literals only, whose regions are
//! wide enough for a vote to carry information about nearby tests.

use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::error::{LearnError, SessionError};
use crate::fuzz::fuzz;
use crate::learn::{examples_of, Example, LearnedOracle, Learner};
use crate::model::{LabeledTest, MutationConfig, TestCase, Verdict};
use crate::number::Rational;
use crate::rng::SessionRng;
use crate::subject::Subject;

/// Fresh neighbours drawn per member before it abstains.
pub const MAX_REDRAWS: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitteeDecision {
    pub send_to_human: bool,
    /// The current oracle alone labeled the test failing; no committee was formed.
    pub shortcut: bool,
    pub votes: Option<u32>,
    /// `votes / (2 · voting members)`.
    pub theta_hat: Option<Rational>,
    /// Members that produced both hypothetical oracles.
    pub members: u32,
    pub abstained: u32,
    /// Per member: (passing-hypothesis vote, failing-hypothesis vote).
    pub member_votes: Vec<(bool, bool)>,
}

impl CommitteeDecision {
    pub fn shortcut() -> Self {
        Self {
            send_to_human: true,
            shortcut: true,
            votes: None,
            theta_hat: None,
            members: 0,
            abstained: 0,
            member_votes: Vec::new(),
        }
    }

    /// Aggregates `votes` cast by `members` voting pairs. Ties go to the human.
    pub fn from_votes(votes: u32, members: u32, abstained: u32) -> Self {
        let theta_hat = (members > 0)
            .then(|| Rational::new(BigInt::from(votes), BigInt::from(2 * members)));
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        let send_to_human = theta_hat.as_ref().is_some_and(|t| *t >= half);
        Self {
            send_to_human,
            shortcut: false,
            votes: Some(votes),
            theta_hat,
            members,
            abstained,
            member_votes: Vec::new(),
        }
    }
}

/// Votes of the two look-one-ahead oracles built around neighbour `probe`.
/// Both are sampled with the same `seed`, so they differ only in the label.
pub fn hypothetical_votes<L: Learner + ?Sized>(
    query: &TestCase,
    probe: &TestCase,
    suite: &[LabeledTest],
    learner: &L,
    order: [Verdict; 2],
    seed: u64,
) -> Result<[bool; 2], LearnError> {
    let mut base: Vec<Example<'_>> = examples_of(suite);
    let mut out = [false; 2];
    for (slot, verdict) in order.into_iter().enumerate() {
        base.push(Example::new(probe, verdict));
        let oracle = learner.learn_sample(&base, seed)?;
        base.pop();
        out[slot] = oracle.predicts_failing(query).unwrap_or(false);
    }
    Ok(out)
}

/// Decides whether `query` should be labeled by the human.
#[allow(clippy::too_many_arguments)]
pub fn decide2label<S, L>(
    query: &TestCase,
    current: &LearnedOracle,
    suite: &[LabeledTest],
    committee_s: usize,
    subject: &S,
    mutation: &MutationConfig,
    learner: &L,
    rng: &mut SessionRng,
) -> Result<CommitteeDecision, SessionError>
where
    S: Subject + ?Sized,
    L: Learner + ?Sized,
{
    if current.predicts_failing(query)? {
        return Ok(CommitteeDecision::shortcut());
    }
    let mut votes = 0u32;
    let mut abstained = 0u32;
    let mut member_votes = Vec::with_capacity(committee_s);
    for _ in 0..committee_s {
        let mut cast = None;
        for _ in 0..MAX_REDRAWS {
            let Ok(probe) = fuzz(query, subject, mutation, rng) else {
                continue;
            };
            if suite.iter().any(|t| t.test.input == probe.input) {
                continue;
            }
            match hypothetical_votes(
                query,
                &probe,
                suite,
                learner,
                [Verdict::Passing, Verdict::Failing],
                rng.next_u64(),
            ) {
                Ok([pass_vote, fail_vote]) => {
                    cast = Some((pass_vote, fail_vote));
                    break;
                }
                Err(LearnError::Contradiction { .. }) => continue,
                Err(e) => return Err(e.into()),
            }
        }
        match cast {
            Some((p, f)) => {
                votes += p as u32 + f as u32;
                member_votes.push((p, f));
            }
            None => abstained += 1,
        }
    }
    let members = committee_s as u32 - abstained;
    let mut decision = CommitteeDecision::from_votes(votes, members, abstained);
    decision.member_votes = member_votes;
    Ok(decision)
}
