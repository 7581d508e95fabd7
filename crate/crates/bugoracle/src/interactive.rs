//! A human oracle answered from outside the session thread.
//!
//! The session blocks in [`HumanOracle::label`] while the query sits in a
//! single slot; another thread reads the slot and submits the answer. Each
//! query accepts exactly one answer.

use std::collections::BTreeSet;
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::time::{Duration, Instant};

use bugoracle_core::{
    formula_to_text, GenerationEvent, HumanError, HumanOracle, Label, LabeledTest, LearnedOracle,
    Query, SessionObserver, Source, TestCase,
};

use crate::events::EventRecord;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PendingQuery {
    pub id: u64,
    pub test: TestCase,
    /// Milliseconds since the channel was created.
    pub issued_at_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SubmitError {
    #[error("query {0} is not pending")]
    Stale(u64),
    #[error("query {0} was already answered")]
    Duplicate(u64),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Default)]
struct Slot {
    pending: Option<PendingQuery>,
    answer: Option<(u64, Label)>,
    answered: BTreeSet<u64>,
    closed: bool,
}

pub struct LabelChannel {
    slot: Mutex<Slot>,
    changed: Condvar,
    created: Instant,
}

impl Default for LabelChannel {
    fn default() -> Self {
        Self {
            slot: Mutex::new(Slot::default()),
            changed: Condvar::new(),
            created: Instant::now(),
        }
    }
}

impl LabelChannel {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    fn lock(&self) -> MutexGuard<'_, Slot> {
        self.slot.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn pending(&self) -> Option<PendingQuery> {
        self.lock().pending.clone()
    }

    /// Answers query `id`. Only the currently pending query can be answered, once.
    pub fn submit(&self, id: u64, label: Label) -> Result<(), SubmitError> {
        let mut slot = self.lock();
        let test = match &slot.pending {
            Some(p) if p.id == id => &p.test,
            _ if slot.answered.contains(&id) => return Err(SubmitError::Duplicate(id)),
            _ => return Err(SubmitError::Stale(id)),
        };
        label.check(test).map_err(|e| SubmitError::Invalid(e.to_string()))?;
        slot.pending = None;
        slot.answered.insert(id);
        slot.answer = Some((id, label));
        self.changed.notify_all();
        Ok(())
    }

    /// Wakes a blocked session; further queries fail with [`HumanError::Closed`].
    pub fn close(&self) {
        let mut slot = self.lock();
        slot.closed = true;
        slot.pending = None;
        self.changed.notify_all();
    }

    /// Blocks until someone pends a query or `timeout` passes.
    pub fn wait_for_query(&self, timeout: Duration) -> Option<PendingQuery> {
        let deadline = Instant::now() + timeout;
        let mut slot = self.lock();
        loop {
            if let Some(p) = &slot.pending {
                return Some(p.clone());
            }
            let now = Instant::now();
            if slot.closed || now >= deadline {
                return None;
            }
            slot = self
                .changed
                .wait_timeout(slot, deadline - now)
                .unwrap_or_else(|e| e.into_inner())
                .0;
        }
    }
}

/// The session side of a [`LabelChannel`].
pub struct InteractiveOracle {
    channel: Arc<LabelChannel>,
    deadline: Option<Instant>,
}

impl InteractiveOracle {
    /// `deadline` is the session's global timeout; unanswered queries past it
    /// are dropped so the loop can notice the timeout.
    pub fn new(channel: Arc<LabelChannel>, deadline: Option<Instant>) -> Self {
        Self { channel, deadline }
    }
}

impl HumanOracle for InteractiveOracle {
    fn label(&mut self, query: &Query) -> Result<Label, HumanError> {
        let channel = &self.channel;
        let mut slot = channel.lock();
        if slot.closed {
            return Err(HumanError::Closed("channel closed".into()));
        }
        slot.answer = None;
        slot.pending = Some(PendingQuery {
            id: query.id,
            test: query.test.clone(),
            issued_at_ms: channel.created.elapsed().as_millis(),
        });
        channel.changed.notify_all();
        loop {
            if let Some((id, label)) = slot.answer.take() {
                if id == query.id {
                    return Ok(label);
                }
            }
            if slot.closed {
                return Err(HumanError::Closed("channel closed".into()));
            }
            match self.deadline {
                Some(deadline) => {
                    let now = Instant::now();
                    if now >= deadline {
                        slot.pending = None;
                        return Err(HumanError::Unavailable("no answer before the session timeout".into()));
                    }
                    slot = channel
                        .changed
                        .wait_timeout(slot, deadline - now)
                        .unwrap_or_else(|e| e.into_inner())
                        .0;
                }
                None => slot = channel.changed.wait(slot).unwrap_or_else(|e| e.into_inner()),
            }
        }
    }

    fn source(&self) -> Source {
        Source::Human
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunState {
    Running,
    Complete,
    Failed,
}

impl RunState {
    pub fn as_str(self) -> &'static str {
        match self {
            RunState::Running => "running",
            RunState::Complete => "complete",
            RunState::Failed => "failed",
        }
    }
}

/// What the HTTP layer reports about a live session.
#[derive(Clone, Debug)]
pub struct SessionStatus {
    pub subject: String,
    pub arity: usize,
    pub budget_l: usize,
    pub committee_s: usize,
    pub rng_seed: u64,
    pub suite_len: usize,
    pub labeled_failing: usize,
    pub generated: usize,
    pub oracle: String,
    pub provenance: String,
    pub state: RunState,
    pub termination: Option<String>,
    pub error: Option<String>,
    pub events: Vec<EventRecord>,
}

impl SessionStatus {
    pub fn new(config: &bugoracle_core::SessionConfig, subject: impl Into<String>) -> Self {
        Self {
            subject: subject.into(),
            arity: config.arity,
            budget_l: config.budget_l,
            committee_s: config.committee_s,
            rng_seed: config.rng_seed,
            suite_len: 0,
            labeled_failing: 0,
            generated: 0,
            oracle: "(true)".into(),
            provenance: "trivial-true".into(),
            state: RunState::Running,
            termination: None,
            error: None,
            events: Vec::new(),
        }
    }
}

pub type SharedStatus = Arc<Mutex<SessionStatus>>;

pub fn lock_status(status: &SharedStatus) -> MutexGuard<'_, SessionStatus> {
    status.lock().unwrap_or_else(|e| e.into_inner())
}

/// Mirrors session progress into a [`SessionStatus`].
pub struct StatusObserver(pub SharedStatus);

impl SessionObserver for StatusObserver {
    fn on_event(&mut self, event: &GenerationEvent) {
        let mut s = lock_status(&self.0);
        s.generated = event.iter;
        s.events.push(EventRecord::from(event));
    }

    fn on_oracle(&mut self, suite: &[LabeledTest], oracle: &LearnedOracle) {
        let mut s = lock_status(&self.0);
        s.suite_len = suite.len();
        s.labeled_failing = suite.iter().skip(1).filter(|t| t.is_failing()).count();
        s.oracle = formula_to_text(oracle.formula());
        s.provenance = oracle.provenance().as_str().to_string();
    }
}

/// Asks on a terminal: `f [expected]` for failing, `p` for passing.
pub struct TerminalOracle<R, W> {
    input: R,
    output: W,
}

impl<R: std::io::BufRead, W: std::io::Write> TerminalOracle<R, W> {
    pub fn new(input: R, output: W) -> Self {
        Self { input, output }
    }
}

/// Parses a terminal answer such as `f`, `fail 2` or `pass`.
pub fn parse_answer(line: &str) -> Result<Label, String> {
    let mut words = line.split_whitespace();
    let verdict = match words.next() {
        Some("f" | "fail") => bugoracle_core::Verdict::Failing,
        Some("p" | "pass") => bugoracle_core::Verdict::Passing,
        _ => return Err("answer `f [expected]` or `p`".into()),
    };
    let expected_output = match words.next() {
        Some(w) => Some(bugoracle_core::number::parse_number(w).map_err(|e| e.to_string())?),
        None => None,
    };
    if words.next().is_some() {
        return Err("too many words".into());
    }
    Ok(Label {
        verdict,
        expected_output,
    })
}

impl<R: std::io::BufRead, W: std::io::Write> HumanOracle for TerminalOracle<R, W> {
    fn label(&mut self, query: &Query) -> Result<Label, HumanError> {
        let closed = |e: std::io::Error| HumanError::Closed(e.to_string());
        loop {
            write!(
                self.output,
                "query {}: inputs {}, program output {}. bug observed? [f [expected] / p] ",
                query.id,
                bugoracle_core::number::format_numbers(query.test.input.values()),
                bugoracle_core::number::format_number(&query.test.output),
            )
            .map_err(closed)?;
            self.output.flush().map_err(closed)?;
            let mut line = String::new();
            if self.input.read_line(&mut line).map_err(closed)? == 0 {
                return Err(HumanError::Closed("end of input".into()));
            }
            match parse_answer(&line).and_then(|l| l.check(&query.test).map(|_| l).map_err(|e| e.to_string())) {
                Ok(label) => return Ok(label),
                Err(e) => writeln!(self.output, "{e}").map_err(closed)?,
            }
        }
    }

    fn source(&self) -> Source {
        Source::Human
    }
}
