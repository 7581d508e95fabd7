//! Mutational fuzzing around failing tests.
//!
//! Each position of the seed input independently keeps its value with
//! probability `keep_prob`; otherwise one of the configured operators is
//! drawn uniformly and applied.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::FuzzError;
use crate::model::{InputVector, MutationConfig, TestCase};
use crate::number::{int, Rational};
use crate::rng::SessionRng;
use crate::subject::{run_subject, Subject};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MutationOp {
    Keep,
    Inc1,
    Dec1,
    Add10,
    Sub10,
    Mul10,
    Div10,
    RandomReplace,
}

impl MutationOp {
    pub const NON_KEEP: [MutationOp; 7] = [
        MutationOp::Inc1,
        MutationOp::Dec1,
        MutationOp::Add10,
        MutationOp::Sub10,
        MutationOp::Mul10,
        MutationOp::Div10,
        MutationOp::RandomReplace,
    ];

    pub fn id(self) -> &'static str {
        match self {
            MutationOp::Keep => "keep",
            MutationOp::Inc1 => "inc1",
            MutationOp::Dec1 => "dec1",
            MutationOp::Add10 => "add10",
            MutationOp::Sub10 => "sub10",
            MutationOp::Mul10 => "mul10",
            MutationOp::Div10 => "div10",
            MutationOp::RandomReplace => "random-replace",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        core::iter::once(MutationOp::Keep)
            .chain(Self::NON_KEEP)
            .find(|op| op.id() == id)
    }

    pub fn apply(
        self,
        value: &Rational,
        config: &MutationConfig,
        integer_only: bool,
        rng: &mut SessionRng,
    ) -> Rational {
        match self {
            MutationOp::Keep => value.clone(),
            MutationOp::Inc1 => value + int(1),
            MutationOp::Dec1 => value - int(1),
            MutationOp::Add10 => value + int(10),
            MutationOp::Sub10 => value - int(10),
            MutationOp::Mul10 => value * int(10),
            MutationOp::Div10 => {
                let q = value / int(10);
                if integer_only {
                    q.trunc()
                } else {
                    q
                }
            }
            MutationOp::RandomReplace => {
                let (lo, hi) = config.random_range;
                Rational::from_integer(BigInt::from(rng.int_in(lo, hi)))
            }
        }
    }
}

/// Draws the operator for one position.
pub fn draw_op(config: &MutationConfig, rng: &mut SessionRng) -> MutationOp {
    if config.ops.is_empty() || rng.chance(config.keep_prob) {
        MutationOp::Keep
    } else {
        config.ops[rng.index(config.ops.len())]
    }
}

/// Uniformly random element of a nonempty set of failing tests.
pub fn select<'a, T>(failing: &'a [T], rng: &mut SessionRng) -> Result<&'a T, FuzzError> {
    if failing.is_empty() {
        return Err(FuzzError::EmptySelection);
    }
    Ok(&failing[rng.index(failing.len())])
}

/// Applies an explicit operator per position.
pub fn mutate_with(
    input: &InputVector,
    ops: &[MutationOp],
    config: &MutationConfig,
    integer_only: bool,
    rng: &mut SessionRng,
) -> InputVector {
    let values: Vec<Rational> = input
        .values()
        .iter()
        .zip(ops.iter().copied().chain(core::iter::repeat(MutationOp::Keep)))
        .map(|(v, op)| op.apply(v, config, integer_only, rng))
        .collect();
    InputVector::new(values).expect("mutation preserves arity")
}

pub fn mutate(
    input: &InputVector,
    config: &MutationConfig,
    integer_only: bool,
    rng: &mut SessionRng,
) -> InputVector {
    let mut values = Vec::with_capacity(input.arity());
    for v in input.values() {
        let op = draw_op(config, rng);
        values.push(op.apply(v, config, integer_only, rng));
    }
    InputVector::new(values).expect("mutation preserves arity")
}

/// Mutates the seed's input and executes the subject on the result.
/// The returned output is always freshly computed.
pub fn fuzz<S: Subject + ?Sized>(
    seed: &TestCase,
    subject: &S,
    config: &MutationConfig,
    rng: &mut SessionRng,
) -> Result<TestCase, FuzzError> {
    let integer_only = config.integer_only || subject.integer_only();
    let input = mutate(&seed.input, config, integer_only, rng);
    Ok(run_subject(subject, &input)?)
}

/// L∞ distance between two inputs of equal arity.
pub fn linf_distance(a: &InputVector, b: &InputVector) -> Rational {
    use num_traits::Signed;
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(Rational::zero(), |m, d| if d > m { d } else { m })
}
