use std::fs;

use bugoracle::events::{events_jsonl, EventRecord, EVENTS};
use bugoracle::oracle_file::{read_formula, sha256_hex, write_oracle, OracleSidecar, ORACLE, SIDECAR};
use bugoracle::suite::{manifest_json, MANIFEST};
use bugoracle::{export_suite, import_suite};
use bugoracle_core::number::int;
use bugoracle_core::{
    run_session, text_to_formula, Builtin, InputVector, Label, LabeledTest, Rational,
    SessionConfig, SimulatedHumanOracle, Source, TestCase, Verdict,
};
use num_bigint::BigInt;
use proptest::prelude::*;

fn test(input: &[i64], output: i64) -> TestCase {
    TestCase::new(InputVector::from_ints(input).unwrap(), int(output))
}

fn seed_suite() -> Vec<LabeledTest> {
    vec![LabeledTest::new(test(&[2, 2, 2], 2), Label::failing().with_expected(int(1)), Source::Seed).unwrap()]
}

#[test]
fn seed_only_suite_layout() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = export_suite(&seed_suite(), "builtin:triangle-steve", 3, dir.path()).unwrap();
    assert_eq!(fs::read_to_string(dir.path().join("t1.in")).unwrap(), "2 2 2\n");
    assert_eq!(fs::read_to_string(dir.path().join("t1.expected")).unwrap(), "1\n");
    let on_disk = fs::read_to_string(dir.path().join(MANIFEST)).unwrap();
    assert_eq!(on_disk, manifest_json(&manifest));

    let json: serde_json::Value = serde_json::from_str(&on_disk).unwrap();
    assert_eq!(json["subject"], "builtin:triangle-steve");
    assert_eq!(json["arity"], 3);
    let entry = &json["tests"][0];
    assert_eq!(entry["id"], 1);
    assert_eq!(entry["input"], "t1.in");
    assert_eq!(entry["output"], "2");
    assert_eq!(entry["verdict"], "fail");
    assert_eq!(entry["source"], "seed");
    assert_eq!(entry["expected"], "t1.expected");
    assert_eq!(entry["expected_missing"], false);

    let (read, suite) = import_suite(dir.path()).unwrap();
    assert_eq!(read, manifest);
    assert_eq!(suite, seed_suite());
}

#[test]
fn missing_expected_output_is_flagged() {
    let mut suite = seed_suite();
    suite.push(LabeledTest::new(test(&[3, 3, 3], 2), Label::failing(), Source::Human).unwrap());
    suite.push(LabeledTest::new(test(&[1, 2, 3], 4), Label::passing(), Source::Human).unwrap());
    let dir = tempfile::tempdir().unwrap();
    let manifest = export_suite(&suite, "./tri", 3, dir.path()).unwrap();
    assert!(manifest.tests[1].expected_missing);
    assert_eq!(manifest.tests[1].expected, None);
    assert!(!dir.path().join("t2.expected").exists());
    assert!(dir.path().join("t3.in").exists());
    let (_, read) = import_suite(dir.path()).unwrap();
    assert_eq!(read, suite);
}

#[test]
fn import_rejects_bad_suites() {
    let dir = tempfile::tempdir().unwrap();
    export_suite(&seed_suite(), "s", 3, dir.path()).unwrap();
    fs::write(dir.path().join("t1.in"), "2 2\n").unwrap();
    assert!(import_suite(dir.path()).is_err(), "arity mismatch");

    fs::write(dir.path().join("t1.in"), "2 2 2\n").unwrap();
    fs::write(dir.path().join("t1.expected"), "2\n").unwrap();
    assert!(import_suite(dir.path()).is_err(), "failing label with expected == output");

    fs::write(dir.path().join(MANIFEST), "{").unwrap();
    assert!(import_suite(dir.path()).is_err(), "malformed manifest");

    let empty = tempfile::tempdir().unwrap();
    assert!(import_suite(empty.path()).is_err(), "no manifest");
}

fn rational() -> impl Strategy<Value = Rational> {
    (-1000i64..1000, prop::sample::select(vec![1i64, 2, 4, 5, 8, 10, 3]))
        .prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

fn labeled(arity: usize) -> impl Strategy<Value = LabeledTest> {
    (
        prop::collection::vec(rational(), arity),
        rational(),
        any::<bool>(),
        prop::option::of(rational()),
        prop::sample::select(vec![Source::Seed, Source::Human, Source::SimulatedGolden]),
    )
        .prop_map(|(input, output, failing, expected, source)| {
            let test = TestCase::new(InputVector::new(input).unwrap(), output.clone());
            // Keep the expected output consistent with the verdict.
            let expected = match (failing, expected) {
                (true, Some(e)) if e == output => Some(e + int(1)),
                (false, Some(_)) => Some(output),
                (_, e) => e,
            };
            let label = Label {
                verdict: Verdict::from_failing(failing),
                expected_output: expected,
            };
            LabeledTest::new(test, label, source).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn suite_round_trip(
        (arity, suite) in (1usize..4).prop_flat_map(|a| (Just(a), prop::collection::vec(labeled(a), 1..12)))
    ) {
        let dir = tempfile::tempdir().unwrap();
        let written = export_suite(&suite, "subject", arity, dir.path()).unwrap();
        let (manifest, read) = import_suite(dir.path()).unwrap();
        prop_assert_eq!(manifest, written);
        prop_assert_eq!(read, suite);
    }
}

fn session_result() -> bugoracle_core::SessionResult {
    let mut config = SessionConfig::new(3);
    config.budget_l = 6;
    config.rng_seed = 5;
    let mut human = SimulatedHumanOracle::new(Builtin::TriangleGolden);
    run_session(
        &config,
        &Builtin::TriangleSteve,
        InputVector::from_ints(&[2, 2, 2]).unwrap(),
        &mut human,
    )
    .unwrap()
}

#[test]
fn events_jsonl_has_one_record_per_generated_test() {
    let result = session_result();
    let text = events_jsonl(&result.events);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), result.events.len());
    assert!(text.ends_with('\n') || text.is_empty());
    for (line, event) in lines.iter().zip(&result.events) {
        let record: EventRecord = serde_json::from_str(line).unwrap();
        assert_eq!(record, EventRecord::from(event));
        assert_eq!(record.queried, event.queried);
        assert_eq!(record.label.is_some(), event.label.is_some());
        if let Some(i) = record.suite_index {
            let t = &result.suite[i];
            assert_eq!(t.test, event.test);
        }
    }
    assert_eq!(EVENTS, "events.jsonl");
}

#[test]
fn oracle_file_round_trip_and_sidecar() {
    let result = session_result();
    let dir = tempfile::tempdir().unwrap();
    let manifest = export_suite(&result.suite, "builtin:triangle-steve", 3, dir.path()).unwrap();
    let json = manifest_json(&manifest);
    let sidecar = write_oracle(&result.oracle, 3, &json, dir.path()).unwrap();

    let formula = read_formula(&dir.path().join(ORACLE), 3).unwrap();
    assert_eq!(&formula, result.oracle.formula());
    let read: OracleSidecar =
        serde_json::from_str(&fs::read_to_string(dir.path().join(SIDECAR)).unwrap()).unwrap();
    assert_eq!(read, sidecar);
    assert_eq!(read.consistent_with, result.suite.len());
    assert_eq!(
        read.suite_sha256,
        sha256_hex(&fs::read(dir.path().join(MANIFEST)).unwrap())
    );
}

#[test]
fn sha256_matches_known_digest() {
    assert_eq!(
        sha256_hex(b"abc"),
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
    );
}

#[test]
fn hand_written_oracle_file_is_read() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(ORACLE);
    fs::write(&path, "(or (and (= (- x0 x1) 0) (= (- x1 x2) 0) (= o 2)) (= x2 1))\n").unwrap();
    let formula = read_formula(&path, 3).unwrap();
    let expected = text_to_formula("(or (and (= (- x0 x1) 0) (= (- x1 x2) 0) (= o 2)) (= x2 1))", 3).unwrap();
    assert_eq!(formula, expected);
    assert!(read_formula(&path, 2).is_err(), "x2 is out of range for arity 2");
}
