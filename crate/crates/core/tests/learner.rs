use bugoracle_core::learn::{examples_of, memorize_fallback, Example};
use bugoracle_core::number::{int, parse_number};
use bugoracle_core::{
    conditional_accuracy, smt_learn, Builtin, InputVector, Label, LabeledTest, Learner,
    LearnerBudget, Provenance, Rational, SearchLearner, Source, TestCase, ValidationSuite,
};
use proptest::prelude::*;

fn grid(lo: i64, hi: i64) -> ValidationSuite {
    ValidationSuite::from_grid(&Builtin::TriangleSteve, &Builtin::TriangleGolden, lo, hi, &[]).unwrap()
}

fn assert_consistent(formula: &bugoracle_core::Formula, suite: &[LabeledTest]) {
    for t in suite {
        assert_eq!(formula.evaluate(&t.test).unwrap(), t.is_failing(), "{}", t.test);
    }
}

#[test]
fn learns_the_small_grid_exactly() {
    let train = grid(1, 4);
    assert_eq!(train.failing_count(), 6);
    let oracle = smt_learn(train.tests(), &LearnerBudget::default()).unwrap();
    assert_eq!(oracle.provenance(), Provenance::Searched);
    assert_eq!(oracle.consistent_with(), 64);
    assert_consistent(oracle.formula(), train.tests());
}

#[test]
fn generalizes_beyond_memorization() {
    let train = grid(1, 4);
    let held_out = grid(1, 6);
    let learned = smt_learn(train.tests(), &LearnerBudget::default()).unwrap();
    let memorized = memorize_fallback(train.tests()).unwrap();
    let learned_ca = conditional_accuracy(learned.formula(), held_out.tests()).unwrap();
    let memorized_ca = conditional_accuracy(&memorized, held_out.tests()).unwrap();
    // memorization only recognises the 6 failing training points among the 10
    assert_eq!(memorized_ca, Rational::new(6.into(), 10.into()));
    assert!(learned_ca > memorized_ca, "learned {learned_ca}");
}

#[test]
fn all_failing_suite_gives_true() {
    let t = bugoracle_core::subject::run_subject(
        &Builtin::TriangleSteve,
        &InputVector::from_ints(&[2, 2, 2]).unwrap(),
    )
    .unwrap();
    let suite = [LabeledTest::new(t, Label::failing(), Source::Seed).unwrap()];
    let oracle = smt_learn(&suite, &LearnerBudget::default()).unwrap();
    assert_eq!(oracle.formula(), &bugoracle_core::Formula::True);
    assert_eq!(oracle.provenance(), Provenance::TrivialTrue);
}

#[test]
fn tiny_budget_falls_back_to_memorization() {
    let train = grid(1, 4);
    let budget = LearnerBudget {
        max_evaluations: 1,
        ..LearnerBudget::default()
    };
    let oracle = smt_learn(train.tests(), &budget).unwrap();
    assert_eq!(oracle.provenance(), Provenance::MemorizedFallback);
    assert_consistent(oracle.formula(), train.tests());
}

#[test]
fn learns_from_rational_inputs() {
    // abs-like data on non-integral points: failing exactly where x < 0
    let points = ["-2.5", "-0.5", "-1.25", "0.5", "1.75", "3"];
    let suite: Vec<LabeledTest> = points
        .iter()
        .map(|p| {
            let x = parse_number(p).unwrap();
            let failing = x < int(0);
            let test = TestCase::new(InputVector::new(vec![x.clone()]).unwrap(), x);
            let label = if failing { Label::failing() } else { Label::passing() };
            LabeledTest::new(test, label, Source::Human).unwrap()
        })
        .collect();
    let oracle = smt_learn(&suite, &LearnerBudget::default()).unwrap();
    assert_eq!(oracle.provenance(), Provenance::Searched);
    assert_consistent(oracle.formula(), &suite);
    assert_eq!(oracle.formula().literal_count(), 1);
}

#[test]
fn sampling_is_seeded_and_consistent() {
    let train = grid(1, 3);
    let examples: Vec<Example<'_>> = examples_of(train.tests());
    let learner = SearchLearner::new(LearnerBudget::default());
    let a = learner.learn_sample(&examples, 9).unwrap();
    assert_eq!(a, learner.learn_sample(&examples, 9).unwrap());
    let mut formulas = std::collections::BTreeSet::new();
    for seed in 0..12 {
        let o = learner.learn_sample(&examples, seed).unwrap();
        assert_consistent(o.formula(), train.tests());
        formulas.insert(bugoracle_core::formula_to_text(o.formula()));
    }
    assert!(formulas.len() > 1, "different seeds pick different consistent oracles");
}

fn suite_strategy() -> impl Strategy<Value = Vec<LabeledTest>> {
    prop::collection::vec((prop::collection::vec(-6i64..7, 2), -6i64..7, any::<bool>()), 1..14).prop_map(
        |rows| {
            let mut seen = std::collections::BTreeSet::new();
            rows.into_iter()
                .filter(|(input, _, _)| seen.insert(input.clone()))
                .enumerate()
                // sessions always start from a failing seed
                .map(|(i, (input, output, failing))| (input, output, failing || i == 0))
                .map(|(input, output, failing)| {
                    let test = TestCase::new(InputVector::from_ints(&input).unwrap(), int(output));
                    let label = if failing { Label::failing() } else { Label::passing() };
                    LabeledTest::new(test, label, Source::Human).unwrap()
                })
                .collect()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn learned_oracles_agree_with_every_label(suite in suite_strategy(), seed in any::<u64>()) {
        let learner = SearchLearner::new(LearnerBudget::default());
        let examples = examples_of(&suite);
        for oracle in [learner.learn(&examples).unwrap(), learner.learn_sample(&examples, seed).unwrap()] {
            prop_assert_eq!(oracle.consistent_with(), suite.len());
            for t in &suite {
                prop_assert_eq!(oracle.predicts_failing(&t.test).unwrap(), t.is_failing());
            }
        }
    }
}
