//! Linear-arithmetic formulas in disjunctive normal form.
//!
//! Variables are positional: `x0 .. x{n-1}` are the inputs and `o` is the
//! actual output, so a literal over arity `n` carries `n + 1` coefficients
//! with the output coefficient last.

use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::FormulaError;
use crate::model::TestCase;
use crate::number::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Le,
    Lt,
    Eq,
    Ne,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, bound: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= bound,
            Relation::Lt => lhs < bound,
            Relation::Eq => lhs == bound,
            Relation::Ne => lhs != bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Eq => "=",
            Relation::Ne => "distinct",
        }
    }
}

/// `sum(coefficients[i] * var[i]) REL bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearLiteral {
    coefficients: Vec<Rational>,
    relation: Relation,
    bound: Rational,
}

impl LinearLiteral {
    pub fn new(
        coefficients: Vec<Rational>,
        relation: Relation,
        bound: Rational,
    ) -> Result<Self, FormulaError> {
        if coefficients.len() < 2 {
            return Err(FormulaError::Dimension {
                expected: 1,
                found: coefficients.len().saturating_sub(1),
            });
        }
        if coefficients.iter().all(Zero::is_zero) {
            return Err(FormulaError::ZeroLiteral);
        }
        Ok(Self {
            coefficients,
            relation,
            bound,
        })
    }

    /// `var REL bound` for a single variable; `var == arity` names the output.
    pub fn on_var(arity: usize, var: usize, relation: Relation, bound: Rational) -> Self {
        let mut coefficients = alloc::vec![Rational::zero(); arity + 1];
        coefficients[var] = crate::number::int(1);
        Self {
            coefficients,
            relation,
            bound,
        }
    }

    /// Number of input variables.
    pub fn arity(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn bound(&self) -> &Rational {
        &self.bound
    }

    pub fn lhs(&self, test: &TestCase) -> Result<Rational, FormulaError> {
        if test.arity() != self.arity() {
            return Err(FormulaError::Dimension {
                expected: self.arity(),
                found: test.arity(),
            });
        }
        let mut acc = Rational::zero();
        for (c, v) in self.coefficients.iter().zip(test.point()) {
            if c.is_zero() {
                continue;
            }
            if c.is_one() {
                acc += v;
            } else if c.is_integer() && c.numer().is_negative() && c.numer().magnitude().is_one() {
                acc -= v;
            } else {
                acc += c * v;
            }
        }
        Ok(acc)
    }

    pub fn holds(&self, test: &TestCase) -> Result<bool, FormulaError> {
        Ok(self.relation.holds(&self.lhs(test)?, &self.bound))
    }

    /// Sum of absolute coefficient values; used as a simplicity measure.
    pub fn weight(&self) -> Rational {
        self.coefficients.iter().map(|c| c.abs()).sum()
    }
}

/// Conjunction of literals. Never empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term(Vec<LinearLiteral>);

impl Term {
    pub fn new(literals: Vec<LinearLiteral>) -> Result<Self, FormulaError> {
        let Some(first) = literals.first() else {
            return Err(FormulaError::Parse {
                pos: 0,
                message: "empty conjunction".into(),
            });
        };
        let arity = first.arity();
        if let Some(odd) = literals.iter().find(|l| l.arity() != arity) {
            return Err(FormulaError::Dimension {
                expected: arity,
                found: odd.arity(),
            });
        }
        Ok(Self(literals))
    }

    pub fn literals(&self) -> &[LinearLiteral] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0[0].arity()
    }

    pub fn holds(&self, test: &TestCase) -> Result<bool, FormulaError> {
        for lit in &self.0 {
            if !lit.holds(test)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A DNF over linear literals, or one of the constants.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Dnf(Vec<Term>),
}

impl Formula {
    pub fn dnf(terms: Vec<Term>) -> Result<Self, FormulaError> {
        let Some(first) = terms.first() else {
            return Ok(Formula::False);
        };
        let arity = first.arity();
        if let Some(odd) = terms.iter().find(|t| t.arity() != arity) {
            return Err(FormulaError::Dimension {
                expected: arity,
                found: odd.arity(),
            });
        }
        Ok(Formula::Dnf(terms))
    }

    /// Arity of the literals, or `None` for the constants.
    pub fn arity(&self) -> Option<usize> {
        match self {
            Formula::Dnf(terms) => terms.first().map(Term::arity),
            _ => None,
        }
    }

    pub fn terms(&self) -> &[Term] {
        match self {
            Formula::Dnf(terms) => terms,
            _ => &[],
        }
    }

    /// True iff some term has all of its literals satisfied at `test`.
    pub fn evaluate(&self, test: &TestCase) -> Result<bool, FormulaError> {
        match self {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Dnf(terms) => {
                if let Some(arity) = self.arity() {
                    if arity != test.arity() {
                        return Err(FormulaError::Dimension {
                            expected: arity,
                            found: test.arity(),
                        });
                    }
                }
                for term in terms {
                    if term.holds(test)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    pub fn literal_count(&self) -> usize {
        self.terms().iter().map(|t| t.literals().len()).sum()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::formula_to_text(self))
    }
}

/// Free-function form of [`Formula::evaluate`].
pub fn evaluate_formula(formula: &Formula, test: &TestCase) -> Result<bool, FormulaError> {
    formula.evaluate(test)
}

/// The constraint characterising the triangle program's bug over
/// `(a, b, c) = (x0, x1, x2)` and output `o`:
///
/// `(a = b ∧ b = c ∧ a ≠ 1 ∧ o = 2) ∨ (a = b ∧ c = 1 ∧ a ≠ 1 ∧ o = 1)`
pub fn triangle_bug_formula() -> Formula {
    use crate::number::{int, ints};
    let diff = |i: usize, j: usize| {
        let mut c = ints(&[0, 0, 0, 0]);
        c[i] = int(1);
        c[j] = int(-1);
        LinearLiteral::new(c, Relation::Eq, int(0)).expect("nonzero")
    };
    let var = |v: usize, rel: Relation, b: i64| LinearLiteral::on_var(3, v, rel, int(b));
    let equilateral = Term::new(alloc::vec![
        diff(0, 1),
        diff(1, 2),
        var(0, Relation::Ne, 1),
        var(3, Relation::Eq, 2),
    ])
    .expect("same arity");
    let isosceles = Term::new(alloc::vec![
        diff(0, 1),
        var(2, Relation::Eq, 1),
        var(0, Relation::Ne, 1),
        var(3, Relation::Eq, 1),
    ])
    .expect("same arity");
    Formula::Dnf(alloc::vec![equilateral, isosceles])
}
