//! S-expression text form of [`Formula`].
//!
//! ```text
//! formula  := (true) | (false) | (or term+) | term
//! term     := (and literal+) | literal
//! literal  := (REL expr expr)      REL ∈ <= < = distinct >= >
//! expr     := number | x<i> | o | (+ expr*) | (- expr+) | (* expr+) | (/ expr number)
//! ```
//!
//! Products and quotients must stay linear. The printer emits one canonical
//! spelling (constant-free left side, constant right side, relations
//! `<=`, `<`, `=`, `distinct`), so parsing printed text gives back the same AST.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::FormulaError;
use crate::formula::{Formula, LinearLiteral, Relation, Term};
use crate::number::{format_number, parse_number, Rational};

pub fn formula_to_text(formula: &Formula) -> String {
    match formula {
        Formula::True => "(true)".to_string(),
        Formula::False => "(false)".to_string(),
        Formula::Dnf(terms) if terms.len() == 1 => term_text(&terms[0]),
        Formula::Dnf(terms) if terms.is_empty() => "(false)".to_string(),
        Formula::Dnf(terms) => {
            let body: Vec<String> = terms.iter().map(term_text).collect();
            format!("(or {})", body.join(" "))
        }
    }
}

fn term_text(term: &Term) -> String {
    match term.literals() {
        [single] => literal_text(single),
        lits => {
            let body: Vec<String> = lits.iter().map(literal_text).collect();
            format!("(and {})", body.join(" "))
        }
    }
}

pub fn literal_text(lit: &LinearLiteral) -> String {
    format!(
        "({} {} {})",
        lit.relation().symbol(),
        lhs_text(lit.coefficients()),
        constant_text(lit.bound())
    )
}

fn var_name(index: usize, arity: usize) -> String {
    if index == arity {
        "o".to_string()
    } else {
        format!("x{index}")
    }
}

fn lhs_text(coefficients: &[Rational]) -> String {
    let arity = coefficients.len() - 1;
    let nonzero: Vec<(usize, &Rational)> = coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .collect();
    let one = Rational::one();
    if let [(i, a), (j, b)] = nonzero[..] {
        if *a == one && *b == -one.clone() {
            return format!("(- {} {})", var_name(i, arity), var_name(j, arity));
        }
        if *a == -one.clone() && *b == one {
            return format!("(- {} {})", var_name(j, arity), var_name(i, arity));
        }
    }
    let parts: Vec<String> = nonzero
        .iter()
        .map(|&(i, c)| {
            let name = var_name(i, arity);
            if *c == one {
                name
            } else if *c == -one.clone() {
                format!("(- {name})")
            } else {
                format!("(* {} {name})", constant_text(c))
            }
        })
        .collect();
    if parts.len() == 1 {
        parts.into_iter().next().unwrap_or_default()
    } else {
        format!("(+ {})", parts.join(" "))
    }
}

fn constant_text(value: &Rational) -> String {
    let magnitude = value.abs();
    let body = {
        let dec = format_number(&magnitude);
        if dec.contains('/') {
            format!("(/ {} {})", magnitude.numer(), magnitude.denom())
        } else {
            dec
        }
    };
    if value.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

enum Sexp {
    Atom(usize, String),
    List(usize, Vec<Sexp>),
}

impl Sexp {
    fn pos(&self) -> usize {
        match self {
            Sexp::Atom(p, _) | Sexp::List(p, _) => *p,
        }
    }
}

fn perr(pos: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Parse {
        pos,
        message: message.into(),
    }
}

fn read_sexp(text: &str) -> Result<Sexp, FormulaError> {
    let bytes = text.as_bytes();
    let mut stack: Vec<(usize, Vec<Sexp>)> = Vec::new();
    let mut done: Option<Sexp> = None;
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b';' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            b if b.is_ascii_whitespace() => {}
            b'(' => {
                if done.is_some() {
                    return Err(perr(i, "trailing input after formula"));
                }
                stack.push((i, Vec::new()));
            }
            b')' => {
                let (start, items) = stack.pop().ok_or_else(|| perr(i, "unbalanced `)`"))?;
                let list = Sexp::List(start, items);
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(list),
                    None => done = Some(list),
                }
            }
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && bytes[i] != b'('
                    && bytes[i] != b')'
                {
                    i += 1;
                }
                let atom = Sexp::Atom(start, text[start..i].to_string());
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(atom),
                    None if done.is_none() => done = Some(atom),
                    None => return Err(perr(start, "trailing input after formula")),
                }
                continue;
            }
        }
        i += 1;
    }
    if let Some((start, _)) = stack.last() {
        return Err(perr(*start, "unclosed `(`"));
    }
    done.ok_or_else(|| perr(text.len(), "empty input"))
}

/// Parses formula text over `arity` input variables.
pub fn text_to_formula(text: &str, arity: usize) -> Result<Formula, FormulaError> {
    let sexp = read_sexp(text)?;
    let parser = Parser { arity };
    parser.formula(&sexp)
}

struct Parser {
    arity: usize,
}

/// Linear form `coefficients · vars + constant`.
struct Linear {
    coefficients: Vec<Rational>,
    constant: Rational,
}

impl Linear {
    fn constant(arity: usize, value: Rational) -> Self {
        Self {
            coefficients: alloc::vec![Rational::zero(); arity + 1],
            constant: value,
        }
    }

    fn is_constant(&self) -> bool {
        self.coefficients.iter().all(Zero::is_zero)
    }

    fn add(mut self, other: &Linear, sign: &Rational) -> Self {
        for (a, b) in self.coefficients.iter_mut().zip(&other.coefficients) {
            *a += b * sign;
        }
        self.constant += &other.constant * sign;
        self
    }

    fn scale(mut self, k: &Rational) -> Self {
        for c in &mut self.coefficients {
            *c *= k;
        }
        self.constant *= k;
        self
    }
}

fn head(items: &[Sexp]) -> Option<&str> {
    match items.first() {
        Some(Sexp::Atom(_, s)) => Some(s.as_str()),
        _ => None,
    }
}

impl Parser {
    fn formula(&self, sexp: &Sexp) -> Result<Formula, FormulaError> {
        match sexp {
            Sexp::Atom(_, s) if s == "true" => Ok(Formula::True),
            Sexp::Atom(_, s) if s == "false" => Ok(Formula::False),
            Sexp::List(pos, items) => match head(items) {
                Some("true") if items.len() == 1 => Ok(Formula::True),
                Some("false") if items.len() == 1 => Ok(Formula::False),
                Some("or") => {
                    if items.len() < 2 {
                        return Err(perr(*pos, "`or` needs at least one term"));
                    }
                    let terms = items[1..]
                        .iter()
                        .map(|t| self.term(t))
                        .collect::<Result<Vec<_>, _>>()?;
                    Formula::dnf(terms)
                }
                _ => Ok(Formula::Dnf(alloc::vec![self.term(sexp)?])),
            },
            Sexp::Atom(pos, s) => Err(perr(*pos, format!("expected a formula, found `{s}`"))),
        }
    }

    fn term(&self, sexp: &Sexp) -> Result<Term, FormulaError> {
        match sexp {
            Sexp::List(pos, items) if head(items) == Some("and") => {
                if items.len() < 2 {
                    return Err(perr(*pos, "`and` needs at least one literal"));
                }
                let lits = items[1..]
                    .iter()
                    .map(|l| self.literal(l))
                    .collect::<Result<Vec<_>, _>>()?;
                Term::new(lits)
            }
            _ => Ok(Term::new(alloc::vec![self.literal(sexp)?])?),
        }
    }

    fn literal(&self, sexp: &Sexp) -> Result<LinearLiteral, FormulaError> {
        let Sexp::List(pos, items) = sexp else {
            return Err(perr(sexp.pos(), "expected a literal"));
        };
        let op = head(items).ok_or_else(|| perr(*pos, "expected a relation"))?;
        if items.len() != 3 {
            return Err(perr(*pos, format!("`{op}` takes exactly two operands")));
        }
        let (relation, flip) = match op {
            "<=" => (Relation::Le, false),
            "<" => (Relation::Lt, false),
            "=" => (Relation::Eq, false),
            "distinct" => (Relation::Ne, false),
            ">=" => (Relation::Le, true),
            ">" => (Relation::Lt, true),
            other => return Err(perr(items[0].pos(), format!("unknown relation `{other}`"))),
        };
        let lhs = self.expr(&items[1])?;
        let rhs = self.expr(&items[2])?;
        let minus_one = -Rational::one();
        // lhs - rhs REL 0, or rhs - lhs REL 0 for >= and >
        let diff = if flip {
            rhs.add(&lhs, &minus_one)
        } else {
            lhs.add(&rhs, &minus_one)
        };
        if diff.is_constant() {
            return Err(perr(*pos, "literal mentions no variable"));
        }
        LinearLiteral::new(diff.coefficients, relation, -diff.constant)
    }

    fn expr(&self, sexp: &Sexp) -> Result<Linear, FormulaError> {
        match sexp {
            Sexp::Atom(pos, s) => self.atom(*pos, s),
            Sexp::List(pos, items) => {
                let op = head(items).ok_or_else(|| perr(*pos, "expected an operator"))?;
                let args = items[1..]
                    .iter()
                    .map(|e| self.expr(e))
                    .collect::<Result<Vec<_>, _>>()?;
                let one = Rational::one();
                match op {
                    "+" => Ok(args
                        .iter()
                        .fold(Linear::constant(self.arity, Rational::zero()), |acc, a| {
                            acc.add(a, &one)
                        })),
                    "-" => {
                        let mut it = args.into_iter();
                        let first = it.next().ok_or_else(|| perr(*pos, "`-` needs an operand"))?;
                        let rest: Vec<Linear> = it.collect();
                        if rest.is_empty() {
                            Ok(first.scale(&-one))
                        } else {
                            Ok(rest.iter().fold(first, |acc, a| acc.add(a, &-one.clone())))
                        }
                    }
                    "*" => {
                        let mut acc: Option<Linear> = None;
                        for a in args {
                            acc = Some(match acc {
                                None => a,
                                Some(prev) if prev.is_constant() => a.scale(&prev.constant),
                                Some(prev) if a.is_constant() => prev.scale(&a.constant),
                                Some(_) => return Err(perr(*pos, "nonlinear product")),
                            });
                        }
                        acc.ok_or_else(|| perr(*pos, "`*` needs an operand"))
                    }
                    "/" => {
                        if args.len() != 2 {
                            return Err(perr(*pos, "`/` takes exactly two operands"));
                        }
                        let mut it = args.into_iter();
                        let num = it.next().expect("two args");
                        let den = it.next().expect("two args");
                        if !den.is_constant() || den.constant.is_zero() {
                            return Err(perr(*pos, "division by a non-constant or zero"));
                        }
                        Ok(num.scale(&den.constant.recip()))
                    }
                    other => Err(perr(items[0].pos(), format!("unknown operator `{other}`"))),
                }
            }
        }
    }

    fn atom(&self, pos: usize, s: &str) -> Result<Linear, FormulaError> {
        if s == "o" {
            let mut l = Linear::constant(self.arity, Rational::zero());
            l.coefficients[self.arity] = Rational::one();
            return Ok(l);
        }
        if let Some(idx) = s.strip_prefix('x') {
            let i: usize = idx
                .parse()
                .map_err(|_| perr(pos, format!("bad variable `{s}`")))?;
            if i >= self.arity {
                return Err(perr(pos, format!("variable `{s}` exceeds arity {}", self.arity)));
            }
            let mut l = Linear::constant(self.arity, Rational::zero());
            l.coefficients[i] = Rational::one();
            return Ok(l);
        }
        let value = parse_number(s).map_err(|_| perr(pos, format!("bad token `{s}`")))?;
        Ok(Linear::constant(self.arity, value))
    }
}
