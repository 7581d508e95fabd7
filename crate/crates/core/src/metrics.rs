//! Oracle quality, labeling effort and patch validation measures.

use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::error::{MetricError, SubjectError};
use crate::formula::Formula;
use crate::model::{InputVector, Label, LabeledTest, Source, Verdict};
use crate::number::{int, Rational};
use crate::session::GenerationEvent;
use crate::subject::{run_subject, Subject};

fn ratio(num: usize, den: usize) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Labeled tests with ground-truth verdicts; holds at least one of each verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationSuite {
    tests: Vec<LabeledTest>,
}

impl ValidationSuite {
    pub fn new(tests: Vec<LabeledTest>) -> Result<Self, MetricError> {
        if tests.is_empty() {
            return Err(MetricError::EmptySuite);
        }
        if !tests.iter().any(LabeledTest::is_failing) {
            return Err(MetricError::NoFailing);
        }
        if tests.iter().all(LabeledTest::is_failing) {
            return Err(MetricError::NoPassing);
        }
        Ok(Self { tests })
    }

    /// Every input of the grid `[lo, hi]^arity` run on `buggy` and labeled by `golden`,
    /// skipping the inputs in `exclude`.
    pub fn from_grid(
        buggy: &dyn Subject,
        golden: &dyn Subject,
        lo: i64,
        hi: i64,
        exclude: &[InputVector],
    ) -> Result<Self, MetricError> {
        let mut tests = Vec::new();
        for input in grid_inputs(buggy.arity(), lo, hi) {
            if exclude.contains(&input) {
                continue;
            }
            let test = run_subject(buggy, &input)?;
            let expected = run_subject(golden, &input)?.output;
            let label = Label {
                verdict: Verdict::from_failing(expected != test.output),
                expected_output: Some(expected),
            };
            tests.push(LabeledTest {
                test,
                label,
                source: Source::SimulatedGolden,
            });
        }
        Self::new(tests)
    }

    pub fn tests(&self) -> &[LabeledTest] {
        &self.tests
    }

    pub fn len(&self) -> usize {
        self.tests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tests.is_empty()
    }

    pub fn failing_count(&self) -> usize {
        self.tests.iter().filter(|t| t.is_failing()).count()
    }
}

impl From<SubjectError> for MetricError {
    fn from(e: SubjectError) -> Self {
        MetricError::Subject(e)
    }
}

/// All integer vectors in `[lo, hi]^arity`, in lexicographic order.
pub fn grid_inputs(arity: usize, lo: i64, hi: i64) -> Vec<InputVector> {
    let mut out = Vec::new();
    if arity == 0 || lo > hi {
        return out;
    }
    let mut current = alloc::vec![lo; arity];
    loop {
        out.push(InputVector::from_ints(&current).expect("arity >= 1"));
        let mut pos = arity;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if current[pos] < hi {
                current[pos] += 1;
                for c in &mut current[pos + 1..] {
                    *c = lo;
                }
                break;
            }
        }
    }
}

/// Share of tests where the oracle's verdict matches the ground truth.
pub fn prediction_accuracy(oracle: &Formula, suite: &[LabeledTest]) -> Result<Rational, MetricError> {
    if suite.is_empty() {
        return Err(MetricError::EmptySuite);
    }
    let mut agree = 0;
    for t in suite {
        if oracle.evaluate(&t.test)? == t.is_failing() {
            agree += 1;
        }
    }
    Ok(ratio(agree, suite.len()))
}

/// Share of actually failing tests that the oracle also labels failing.
pub fn conditional_accuracy(oracle: &Formula, suite: &[LabeledTest]) -> Result<Rational, MetricError> {
    let mut failing = 0;
    let mut hit = 0;
    for t in suite.iter().filter(|t| t.is_failing()) {
        failing += 1;
        if oracle.evaluate(&t.test)? {
            hit += 1;
        }
    }
    if failing == 0 {
        return Err(MetricError::NoFailing);
    }
    Ok(ratio(hit, failing))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffortMetrics {
    pub generated: usize,
    pub labeled: usize,
    pub labeled_failing: usize,
    /// Generated tests whose recorded ground truth is failing; `None` if any is unknown.
    pub generated_failing: Option<usize>,
    pub p_labeled: Rational,
    /// `None` when nothing was labeled.
    pub p_label_failing: Option<Rational>,
    pub p_generate_failing: Option<Rational>,
}

/// Labeling proportions computed from a session's event log.
pub fn effort_metrics(events: &[GenerationEvent]) -> Result<EffortMetrics, MetricError> {
    if events.is_empty() {
        return Err(MetricError::EmptyLog);
    }
    let generated = events.len();
    let labeled = events.iter().filter(|e| e.label.is_some()).count();
    let labeled_failing = events
        .iter()
        .filter(|e| e.label.as_ref().is_some_and(|l| l.verdict.is_failing()))
        .count();
    let generated_failing = events
        .iter()
        .map(|e| e.truth.map(|v| v.is_failing() as usize))
        .sum::<Option<usize>>();
    Ok(EffortMetrics {
        generated,
        labeled,
        labeled_failing,
        generated_failing,
        p_labeled: ratio(labeled, generated),
        p_label_failing: (labeled > 0).then(|| ratio(labeled_failing, labeled)),
        p_generate_failing: generated_failing.map(|f| ratio(f, generated)),
    })
}

/// Share of validation inputs on which `patched` agrees with `golden`.
/// A crash or timeout of the patched program counts as a failed test.
pub fn validation_score(
    patched: &dyn Subject,
    suite: &[LabeledTest],
    golden: &dyn Subject,
) -> Result<Rational, MetricError> {
    if suite.is_empty() {
        return Err(MetricError::EmptySuite);
    }
    if patched.arity() != golden.arity() {
        return Err(MetricError::Subject(SubjectError::Arity {
            expected: golden.arity(),
            found: patched.arity(),
        }));
    }
    let mut pass = 0;
    for t in suite {
        let expected = run_subject(golden, &t.test.input)?.output;
        if let Ok(actual) = run_subject(patched, &t.test.input) {
            if actual.output == expected {
                pass += 1;
            }
        }
    }
    Ok(ratio(pass, suite.len()))
}

/// Median of exact values (mean of the two middle elements for even counts).
pub fn median(values: &[Rational]) -> Option<Rational> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort();
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid].clone()
    } else {
        (&v[mid - 1] + &v[mid]) / int(2)
    })
}

pub fn mean(values: &[Rational]) -> Option<Rational> {
    if values.is_empty() {
        return None;
    }
    let sum: Rational = values.iter().cloned().sum();
    Some(sum / int(values.len() as i64))
}
