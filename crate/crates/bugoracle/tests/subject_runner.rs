use std::time::Duration;

use bugoracle::subject::{parse_input, parse_range, SpecError};
use bugoracle::{ExternalSubject, SubjectSpec};
use bugoracle_core::number::{int, parse_number};
use bugoracle_core::subject::run_subject;
use bugoracle_core::{Builtin, InputVector, Subject, SubjectError};

fn input(v: &[i64]) -> InputVector {
    InputVector::from_ints(v).unwrap()
}

#[test]
fn external_program_reads_one_line_and_prints_one_number() {
    let add = ExternalSubject::new("read a b; echo $((a + b))", 2);
    assert_eq!(add.execute(&input(&[2, 40])).unwrap(), int(42));
    let t = run_subject(&add, &input(&[-3, 1])).unwrap();
    assert_eq!(t.output, int(-2));
}

#[test]
fn external_output_may_be_a_decimal() {
    let half = ExternalSubject::new("read a; echo 0.5", 1);
    assert_eq!(half.execute(&input(&[1])).unwrap(), parse_number("1/2").unwrap());
}

#[test]
fn rational_inputs_are_written_as_decimals() {
    let echo = ExternalSubject::new("read a; echo $a", 1);
    let v = InputVector::new(vec![parse_number("-2.25").unwrap()]).unwrap();
    assert_eq!(echo.execute(&v).unwrap(), parse_number("-2.25").unwrap());
}

#[test]
fn nonzero_exit_is_a_crash() {
    let crash = ExternalSubject::new("read a; exit 3", 1);
    match crash.execute(&input(&[1])) {
        Err(SubjectError::Crash { status, .. }) => assert_eq!(status, Some(3)),
        other => panic!("expected a crash, got {other:?}"),
    }
}

#[test]
fn slow_program_times_out() {
    let slow = ExternalSubject::new("sleep 5; echo 1", 1).with_timeout(Duration::from_millis(200));
    assert_eq!(slow.execute(&input(&[1])), Err(SubjectError::Timeout));
}

#[test]
fn unparseable_output_is_a_format_error() {
    for cmd in ["echo hello", "echo 1 2", "true"] {
        let s = ExternalSubject::new(cmd, 1);
        assert!(
            matches!(s.execute(&input(&[1])), Err(SubjectError::OutputFormat(_))),
            "{cmd}"
        );
    }
}

#[test]
fn program_that_ignores_stdin_still_works() {
    let s = ExternalSubject::new("echo 7", 3);
    assert_eq!(s.execute(&input(&[1, 2, 3])).unwrap(), int(7));
}

#[test]
fn arity_is_checked_before_running() {
    let s = ExternalSubject::new("echo 7", 2);
    assert_eq!(
        run_subject(&s, &input(&[1])),
        Err(SubjectError::Arity { expected: 2, found: 1 })
    );
}

#[test]
fn spec_parsing() {
    assert_eq!(
        SubjectSpec::parse("builtin:triangle-steve").unwrap(),
        SubjectSpec::Builtin(Builtin::TriangleSteve)
    );
    assert_eq!(
        SubjectSpec::parse("builtin:nope"),
        Err(SpecError::UnknownBuiltin("nope".into()))
    );
    assert_eq!(SubjectSpec::parse("  "), Err(SpecError::Empty));
    let ext = SubjectSpec::parse("./prog --fast").unwrap();
    assert_eq!(ext, SubjectSpec::External("./prog --fast".into()));
    assert_eq!(ext.to_string(), "./prog --fast");
    assert!(matches!(ext.arity(None), Err(SpecError::MissingArity(_))));
    assert_eq!(ext.arity(Some(2)), Ok(2));

    let tri = SubjectSpec::Builtin(Builtin::TriangleSteve);
    assert_eq!(tri.to_string(), "builtin:triangle-steve");
    assert_eq!(tri.arity(None), Ok(3));
    assert!(matches!(tri.arity(Some(2)), Err(SpecError::ArityMismatch { .. })));
    assert_eq!(tri.default_golden(), Ok(SubjectSpec::Builtin(Builtin::TriangleGolden)));
    assert_eq!(tri.default_seed().unwrap(), input(&[2, 2, 2]));
    assert!(ext.default_golden().is_err());
}

#[test]
fn default_seeds_fail_on_their_subjects() {
    for b in [Builtin::TriangleSteve, Builtin::AbsBuggy, Builtin::MaxBuggy] {
        let spec = SubjectSpec::Builtin(b);
        let seed = spec.default_seed().unwrap();
        let golden = b.golden().unwrap();
        assert_ne!(b.execute(&seed).unwrap(), golden.execute(&seed).unwrap(), "{spec}");
    }
}

#[test]
fn instantiated_external_subject_uses_the_given_timeout() {
    let spec = SubjectSpec::parse("sleep 5").unwrap();
    let s = spec.instantiate(Some(1), Duration::from_millis(100)).unwrap();
    assert_eq!(s.execute(&input(&[0])), Err(SubjectError::Timeout));
}

#[test]
fn input_and_range_parsing() {
    assert_eq!(parse_input("2 2 2").unwrap(), input(&[2, 2, 2]));
    assert_eq!(parse_input(" 1\t-4 ").unwrap(), input(&[1, -4]));
    assert!(parse_input("").is_err());
    assert!(parse_input("1 x").is_err());
    assert_eq!(parse_range("1..6"), Ok((1, 6)));
    assert_eq!(parse_range("-2..8"), Ok((-2, 8)));
    assert!(parse_range("6..1").is_err());
    assert!(parse_range("6").is_err());
}

#[test]
fn builtin_triangle_examples() {
    let run = |b: Builtin, v: &[i64]| b.execute(&input(v)).unwrap();
    assert_eq!(run(Builtin::TriangleSteve, &[2, 2, 2]), int(2));
    assert_eq!(run(Builtin::TriangleSteve, &[1, 2, 3]), int(4));
    assert_eq!(run(Builtin::TriangleSteve, &[3, 3, 3]), int(2));
    assert_eq!(run(Builtin::TriangleGolden, &[2, 2, 2]), int(1));
}
