//! Programs under test and the built-in example subjects.

use alloc::boxed::Box;
use alloc::string::{String, ToString};

use num_traits::{One, Signed, Zero};

use crate::error::SubjectError;
use crate::model::{InputVector, TestCase};
use crate::number::{int, Rational};

/// A deterministic program mapping a fixed-arity numeric input to one number.
pub trait Subject {
    fn arity(&self) -> usize;

    fn execute(&self, input: &InputVector) -> Result<Rational, SubjectError>;

    /// Whether the program reads integers only.
    fn integer_only(&self) -> bool {
        false
    }

    fn name(&self) -> String;
}

impl<S: Subject + ?Sized> Subject for &S {
    fn arity(&self) -> usize {
        (**self).arity()
    }
    fn execute(&self, input: &InputVector) -> Result<Rational, SubjectError> {
        (**self).execute(input)
    }
    fn integer_only(&self) -> bool {
        (**self).integer_only()
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

impl<S: Subject + ?Sized> Subject for Box<S> {
    fn arity(&self) -> usize {
        (**self).arity()
    }
    fn execute(&self, input: &InputVector) -> Result<Rational, SubjectError> {
        (**self).execute(input)
    }
    fn integer_only(&self) -> bool {
        (**self).integer_only()
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

/// Runs `subject` on `input`, producing the test case `<input, actual output>`.
pub fn run_subject<S: Subject + ?Sized>(
    subject: &S,
    input: &InputVector,
) -> Result<TestCase, SubjectError> {
    if input.arity() != subject.arity() {
        return Err(SubjectError::Arity {
            expected: subject.arity(),
            found: input.arity(),
        });
    }
    let output = subject.execute(input)?;
    Ok(TestCase::new(input.clone(), output))
}

/// Subjects compiled into the crate, each buggy one paired with a golden version.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// Triangle classifier whose equilateral check is written `a == b == c`.
    TriangleSteve,
    TriangleGolden,
    /// The plausible patch replacing the equilateral check with `a == 2`.
    TriangleOverfit,
    /// The correct patch `a == b && b == c`.
    TriangleFixed,
    /// `|x|` that forgets to negate in `-5..0`.
    AbsBuggy,
    AbsGolden,
    /// `max(a, b)` that returns `a` whenever `a >= b - 2`.
    MaxBuggy,
    MaxGolden,
}

impl Builtin {
    pub const ALL: [Builtin; 8] = [
        Builtin::TriangleSteve,
        Builtin::TriangleGolden,
        Builtin::TriangleOverfit,
        Builtin::TriangleFixed,
        Builtin::AbsBuggy,
        Builtin::AbsGolden,
        Builtin::MaxBuggy,
        Builtin::MaxGolden,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Builtin::TriangleSteve => "triangle-steve",
            Builtin::TriangleGolden => "triangle-golden",
            Builtin::TriangleOverfit => "triangle-overfit",
            Builtin::TriangleFixed => "triangle-fixed",
            Builtin::AbsBuggy => "abs-buggy",
            Builtin::AbsGolden => "abs-golden",
            Builtin::MaxBuggy => "max-buggy",
            Builtin::MaxGolden => "max-golden",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.id() == id)
    }

    /// Golden counterpart of a buggy subject.
    pub fn golden(self) -> Option<Builtin> {
        match self {
            Builtin::TriangleSteve | Builtin::TriangleOverfit | Builtin::TriangleFixed => {
                Some(Builtin::TriangleGolden)
            }
            Builtin::AbsBuggy => Some(Builtin::AbsGolden),
            Builtin::MaxBuggy => Some(Builtin::MaxGolden),
            _ => None,
        }
    }

    /// Ground-truth failure region of a buggy subject, in formula text form.
    pub fn failure_constraint(self) -> Option<&'static str> {
        match self {
            Builtin::TriangleSteve => Some(
                "(or (and (= (- x0 x1) 0) (= (- x1 x2) 0) (distinct x0 1) (= o 2)) \
                 (and (= (- x0 x1) 0) (= x2 1) (distinct x0 1) (= o 1)))",
            ),
            Builtin::AbsBuggy => Some("(and (< x0 0) (<= (- x0) 5))"),
            Builtin::MaxBuggy => Some("(and (< (- x0 x1) 0) (<= (- x1 x0) 2))"),
            _ => None,
        }
    }
}

#[derive(Clone, Copy)]
enum EquilateralCheck {
    ChainedEq,
    Correct,
    AEqualsTwo,
}

fn triangle(a: &Rational, b: &Rational, c: &Rational, check: EquilateralCheck) -> i64 {
    let zero = Rational::zero();
    if *a <= zero || *b <= zero || *c <= zero {
        return 4;
    }
    if *a <= c - b || *b <= a - c || *c <= b - a {
        return 4;
    }
    let equilateral = match check {
        // C evaluates `a == b == c` as `(a == b) == c` with `a == b` in {0, 1}
        EquilateralCheck::ChainedEq => {
            let ab = if a == b { Rational::one() } else { Rational::zero() };
            ab == *c
        }
        EquilateralCheck::Correct => a == b && b == c,
        EquilateralCheck::AEqualsTwo => *a == int(2),
    };
    if equilateral {
        return 1;
    }
    if a == b || b == c || c == a {
        return 2;
    }
    3
}

impl Subject for Builtin {
    fn arity(&self) -> usize {
        match self {
            Builtin::AbsBuggy | Builtin::AbsGolden => 1,
            Builtin::MaxBuggy | Builtin::MaxGolden => 2,
            _ => 3,
        }
    }

    fn execute(&self, input: &InputVector) -> Result<Rational, SubjectError> {
        let v = input.values();
        if v.len() != self.arity() {
            return Err(SubjectError::Arity {
                expected: self.arity(),
                found: v.len(),
            });
        }
        let out = match self {
            Builtin::TriangleSteve => int(triangle(&v[0], &v[1], &v[2], EquilateralCheck::ChainedEq)),
            Builtin::TriangleGolden | Builtin::TriangleFixed => {
                int(triangle(&v[0], &v[1], &v[2], EquilateralCheck::Correct))
            }
            Builtin::TriangleOverfit => {
                int(triangle(&v[0], &v[1], &v[2], EquilateralCheck::AEqualsTwo))
            }
            Builtin::AbsGolden => v[0].abs(),
            Builtin::AbsBuggy => {
                if v[0] < int(-5) {
                    -v[0].clone()
                } else {
                    v[0].clone()
                }
            }
            Builtin::MaxGolden => core::cmp::max(&v[0], &v[1]).clone(),
            Builtin::MaxBuggy => {
                if v[0] >= &v[1] - int(2) {
                    v[0].clone()
                } else {
                    v[1].clone()
                }
            }
        };
        Ok(out)
    }

    fn integer_only(&self) -> bool {
        matches!(
            self,
            Builtin::TriangleSteve
                | Builtin::TriangleGolden
                | Builtin::TriangleOverfit
                | Builtin::TriangleFixed
        )
    }

    fn name(&self) -> String {
        let mut s = "builtin:".to_string();
        s.push_str(self.id());
        s
    }
}
