//! The human test oracle: the channel the active loop sends queries to.

use alloc::string::String;

use crate::error::SubjectError;
use crate::model::{Label, LabeledTest, Source, TestCase, Verdict};
use crate::subject::{run_subject, Subject};

/// "For this input the program produced this output; is the bug observed?"
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub id: u64,
    pub test: TestCase,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum HumanError {
    /// No answer for this query; it is discarded and not counted.
    #[error("oracle unavailable: {0}")]
    Unavailable(String),
    /// The channel is gone; the session stops.
    #[error("oracle channel closed: {0}")]
    Closed(String),
}

pub trait HumanOracle {
    fn label(&mut self, query: &Query) -> Result<Label, HumanError>;

    /// Provenance recorded on every label this oracle supplies.
    fn source(&self) -> Source;
}

impl<H: HumanOracle + ?Sized> HumanOracle for &mut H {
    fn label(&mut self, query: &Query) -> Result<Label, HumanError> {
        (**self).label(query)
    }
    fn source(&self) -> Source {
        (**self).source()
    }
}

/// Labels tests by comparing against a golden version of the program.
#[derive(Clone, Debug)]
pub struct SimulatedHumanOracle<G> {
    golden: G,
    queries: usize,
}

impl<G: Subject> SimulatedHumanOracle<G> {
    pub fn new(golden: G) -> Self {
        Self { golden, queries: 0 }
    }

    pub fn golden(&self) -> &G {
        &self.golden
    }

    /// Number of `label` calls answered so far.
    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn golden_label(&self, test: &TestCase) -> Result<Label, SubjectError> {
        let expected = run_subject(&self.golden, &test.input)?.output;
        let verdict = Verdict::from_failing(expected != test.output);
        Ok(Label {
            verdict,
            expected_output: Some(expected),
        })
    }
}

/// Labels `test` with the golden version's verdict and expected output.
pub fn simulated_label<G: Subject>(
    human: &SimulatedHumanOracle<G>,
    test: &TestCase,
) -> Result<LabeledTest, SubjectError> {
    let label = human.golden_label(test)?;
    Ok(LabeledTest {
        test: test.clone(),
        label,
        source: Source::SimulatedGolden,
    })
}

impl<G: Subject> HumanOracle for SimulatedHumanOracle<G> {
    fn label(&mut self, query: &Query) -> Result<Label, HumanError> {
        self.queries += 1;
        self.golden_label(&query.test)
            .map_err(|e| HumanError::Unavailable(alloc::format!("{e}")))
    }

    fn source(&self) -> Source {
        Source::SimulatedGolden
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InputVector;
    use crate::number::int;
    use crate::subject::Builtin;

    fn buggy(i: &[i64]) -> TestCase {
        run_subject(&Builtin::TriangleSteve, &InputVector::from_ints(i).unwrap()).unwrap()
    }

    #[test]
    fn golden_labels() {
        let h = SimulatedHumanOracle::new(Builtin::TriangleGolden);
        let l = simulated_label(&h, &buggy(&[2, 2, 2])).unwrap();
        assert_eq!(l.verdict(), Verdict::Failing);
        assert_eq!(l.label.expected_output, Some(int(1)));
        assert_eq!(l.source, Source::SimulatedGolden);
        // invalid triangle in both versions
        assert_eq!(simulated_label(&h, &buggy(&[1, 2, 3])).unwrap().verdict(), Verdict::Passing);
        assert_eq!(simulated_label(&h, &buggy(&[1, 1, 1])).unwrap().verdict(), Verdict::Passing);
    }

    #[test]
    fn counts_queries() {
        let mut h = SimulatedHumanOracle::new(Builtin::TriangleGolden);
        let q = Query { id: 1, test: buggy(&[3, 3, 1]) };
        assert_eq!(h.label(&q).unwrap().verdict, Verdict::Failing);
        assert_eq!(h.queries(), 1);
    }
}
