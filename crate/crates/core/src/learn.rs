//! Learning a linear-arithmetic oracle that is satisfied by every failing
//! test and by no passing test.
//!
//! The search runs an iterative-deepening ladder over `(terms, literals per
//! term)`. For each literal limit a DNF is built by greedy set cover of the
//! failing points; each term is grown by beam search over a pool of
//! candidate literals that must exclude every passing point. Candidate
//! literals relate a single variable or a pairwise difference of variables
//! (inputs and the output) to a constant taken from the training data or
//! from a small range around zero.
//!
//! When the search finds nothing within budget, the learner memorizes the
//! failing points, one equality term per point. Over distinct points that
//! hypothesis always exists, so a consistent oracle is always returned.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::bits::Bits;
use crate::error::{FormulaError, LearnError, ModelError};
use crate::formula::{Formula, LinearLiteral, Relation, Term};
use crate::model::{LabeledTest, TestCase, Verdict};
use crate::number::{int, Rational};
use crate::rng::SessionRng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LearnerBudget {
    /// Candidate-term scorings allowed per call before falling back.
    pub max_evaluations: usize,
    pub max_terms: usize,
    pub max_literals: usize,
    pub beam_width: usize,
    /// Inclusive range of small integer bounds always in the pool.
    pub small_constants: (i64, i64),
    /// Allow `=` and `distinct` literals; without them every term is an
    /// intersection of half-spaces.
    pub equalities: bool,
}

impl Default for LearnerBudget {
    fn default() -> Self {
        Self {
            max_evaluations: 200_000,
            max_terms: 4,
            max_literals: 4,
            beam_width: 16,
            small_constants: (-2, 2),
            equalities: true,
        }
    }
}

impl LearnerBudget {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.max_evaluations == 0
            || self.max_terms == 0
            || self.max_literals == 0
            || self.beam_width == 0
        {
            return Err(ModelError::InvalidConfig("learner limits must be at least 1"));
        }
        Ok(())
    }

    /// The budget used for committee members: a quarter of the evaluations and
    /// half-space literals only.
    pub fn for_committee(&self) -> Self {
        Self {
            max_evaluations: (self.max_evaluations / 4).max(1),
            equalities: false,
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    TrivialTrue,
    Searched,
    MemorizedFallback,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::TrivialTrue => "trivial-true",
            Provenance::Searched => "searched",
            Provenance::MemorizedFallback => "memorized-fallback",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "trivial-true" => Some(Provenance::TrivialTrue),
            "searched" => Some(Provenance::Searched),
            "memorized-fallback" => Some(Provenance::MemorizedFallback),
            _ => None,
        }
    }
}

/// One training example, borrowed from a suite.
#[derive(Clone, Copy, Debug)]
pub struct Example<'a> {
    pub test: &'a TestCase,
    pub verdict: Verdict,
}

impl<'a> Example<'a> {
    pub fn new(test: &'a TestCase, verdict: Verdict) -> Self {
        Self { test, verdict }
    }
}

pub fn examples_of(suite: &[LabeledTest]) -> Vec<Example<'_>> {
    suite.iter().map(|t| Example::new(&t.test, t.verdict())).collect()
}

/// An automatic oracle known to agree with the suite it was trained on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LearnedOracle {
    formula: Formula,
    consistent_with: usize,
    provenance: Provenance,
}

impl LearnedOracle {
    /// Wraps `formula` after checking it labels every example correctly.
    pub fn checked(
        formula: Formula,
        examples: &[Example<'_>],
        provenance: Provenance,
    ) -> Result<Option<Self>, FormulaError> {
        for ex in examples {
            if formula.evaluate(ex.test)? != ex.verdict.is_failing() {
                return Ok(None);
            }
        }
        Ok(Some(Self {
            formula,
            consistent_with: examples.len(),
            provenance,
        }))
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn consistent_with(&self) -> usize {
        self.consistent_with
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn predicts_failing(&self, test: &TestCase) -> Result<bool, FormulaError> {
        self.formula.evaluate(test)
    }

    pub fn verdict(&self, test: &TestCase) -> Result<Verdict, FormulaError> {
        self.predicts_failing(test).map(Verdict::from_failing)
    }
}

/// Anything that turns labeled examples into a consistent oracle.
pub trait Learner {
    fn learn(&self, examples: &[Example<'_>]) -> Result<LearnedOracle, LearnError>;

    /// A consistent oracle drawn at random among equally good ones, as
    /// committee members need. Deterministic learners return [`Learner::learn`].
    fn learn_sample(&self, examples: &[Example<'_>], _seed: u64) -> Result<LearnedOracle, LearnError> {
        self.learn(examples)
    }
}

impl<L: Learner + ?Sized> Learner for &L {
    fn learn(&self, examples: &[Example<'_>]) -> Result<LearnedOracle, LearnError> {
        (**self).learn(examples)
    }
    fn learn_sample(&self, examples: &[Example<'_>], seed: u64) -> Result<LearnedOracle, LearnError> {
        (**self).learn_sample(examples, seed)
    }
}

/// The default beam-search learner with memorization fallback.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchLearner {
    pub budget: LearnerBudget,
}

impl SearchLearner {
    pub fn new(budget: LearnerBudget) -> Self {
        Self { budget }
    }
}

impl Learner for SearchLearner {
    fn learn(&self, examples: &[Example<'_>]) -> Result<LearnedOracle, LearnError> {
        self.search(examples, None)
    }

    /// Ties between equally scored literals are broken by a seeded shuffle of
    /// the candidate pool instead of by simplicity.
    fn learn_sample(&self, examples: &[Example<'_>], seed: u64) -> Result<LearnedOracle, LearnError> {
        self.search(examples, Some(seed))
    }
}

impl SearchLearner {
    fn search(&self, examples: &[Example<'_>], shuffle: Option<u64>) -> Result<LearnedOracle, LearnError> {
        let data = TrainingData::new(examples)?;
        if data.passing.is_empty() {
            return Ok(LearnedOracle {
                formula: Formula::True,
                consistent_with: examples.len(),
                provenance: Provenance::TrivialTrue,
            });
        }
        let found = match integral_points(&data.points) {
            Some(points) => Search::new(&points, &data, &self.budget, shuffle).run(),
            None => Search::new(&rational_points(&data.points), &data, &self.budget, shuffle).run(),
        };
        if let Some(formula) = found {
            if let Ok(Some(oracle)) = LearnedOracle::checked(formula, examples, Provenance::Searched)
            {
                return Ok(oracle);
            }
        }
        let formula = memorize(&data.arity, &data.failing_tests());
        Ok(LearnedOracle {
            formula,
            consistent_with: examples.len(),
            provenance: Provenance::MemorizedFallback,
        })
    }
}

/// Learns an oracle for `suite` with the default search learner.
pub fn smt_learn(suite: &[LabeledTest], budget: &LearnerBudget) -> Result<LearnedOracle, LearnError> {
    SearchLearner::new(budget.clone()).learn(&examples_of(suite))
}

/// One equality term per distinct failing test, pinning every input and the output.
pub fn memorize_fallback(suite: &[LabeledTest]) -> Result<Formula, LearnError> {
    let examples = examples_of(suite);
    let data = TrainingData::new(&examples)?;
    Ok(memorize(&data.arity, &data.failing_tests()))
}

fn memorize(arity: &usize, failing: &[&TestCase]) -> Formula {
    let terms = failing
        .iter()
        .map(|t| {
            let lits = t
                .point()
                .enumerate()
                .map(|(var, v)| LinearLiteral::on_var(*arity, var, Relation::Eq, v.clone()))
                .collect();
            Term::new(lits).expect("uniform arity")
        })
        .collect();
    Formula::Dnf(terms)
}

/// Deduplicated, contradiction-free training points.
struct TrainingData<'a> {
    arity: usize,
    points: Vec<&'a TestCase>,
    failing: Bits,
    passing: Bits,
}

impl<'a> TrainingData<'a> {
    fn new(examples: &[Example<'a>]) -> Result<Self, LearnError> {
        let first = examples.first().ok_or(LearnError::EmptySuite)?;
        let arity = first.test.arity();
        let mut seen: BTreeMap<&'a TestCase, Verdict> = BTreeMap::new();
        let mut points = Vec::new();
        let mut verdicts = Vec::new();
        for ex in examples {
            if ex.test.arity() != arity {
                return Err(LearnError::Arity {
                    expected: arity,
                    found: ex.test.arity(),
                });
            }
            match seen.get(ex.test) {
                Some(v) if *v != ex.verdict => {
                    return Err(LearnError::Contradiction {
                        point: ex.test.clone(),
                    })
                }
                Some(_) => {}
                None => {
                    seen.insert(ex.test, ex.verdict);
                    points.push(ex.test);
                    verdicts.push(ex.verdict);
                }
            }
        }
        let mut failing = Bits::empty(points.len());
        let mut passing = Bits::empty(points.len());
        for (i, v) in verdicts.iter().enumerate() {
            if v.is_failing() {
                failing.set(i);
            } else {
                passing.set(i);
            }
        }
        if failing.is_empty() {
            return Err(LearnError::NoFailing);
        }
        Ok(Self {
            arity,
            points,
            failing,
            passing,
        })
    }

    fn failing_tests(&self) -> Vec<&'a TestCase> {
        (0..self.points.len())
            .filter(|&i| self.failing.get(i))
            .map(|i| self.points[i])
            .collect()
    }
}

/// Values the candidate pool is built over. Integral training data runs on
/// machine integers; anything else falls back to exact rationals.
trait PoolValue: Clone + Ord {
    fn small(v: i64) -> Self;
    fn diff(&self, other: &Self) -> Self;
    fn magnitude(&self) -> Self;
    fn to_rational(&self) -> Rational;
}

impl PoolValue for i128 {
    fn small(v: i64) -> Self {
        v as i128
    }
    fn diff(&self, other: &Self) -> Self {
        self - other
    }
    fn magnitude(&self) -> Self {
        self.abs()
    }
    fn to_rational(&self) -> Rational {
        Rational::from_integer((*self).into())
    }
}

impl PoolValue for Rational {
    fn small(v: i64) -> Self {
        int(v)
    }
    fn diff(&self, other: &Self) -> Self {
        self - other
    }
    fn magnitude(&self) -> Self {
        self.abs()
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
}

fn integral_points(points: &[&TestCase]) -> Option<Vec<Vec<i128>>> {
    points
        .iter()
        .map(|t| {
            t.point()
                .map(|v| {
                    if !v.is_integer() {
                        return None;
                    }
                    v.to_integer().to_i64().map(i128::from)
                })
                .collect()
        })
        .collect()
}

fn rational_points(points: &[&TestCase]) -> Vec<Vec<Rational>> {
    points.iter().map(|t| t.point().cloned().collect()).collect()
}

/// A linear expression over the point: one variable or the difference of two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Expr {
    Var(usize),
    Diff(usize, usize),
}

impl Expr {
    fn eval<V: PoolValue>(self, point: &[V]) -> V {
        match self {
            Expr::Var(i) => point[i].clone(),
            Expr::Diff(i, j) => point[i].diff(&point[j]),
        }
    }

    fn width(self) -> u8 {
        match self {
            Expr::Var(_) => 1,
            Expr::Diff(..) => 2,
        }
    }

    fn coefficients(self, arity: usize, negate: bool) -> Vec<Rational> {
        let mut c = alloc::vec![Rational::zero(); arity + 1];
        let (pos, neg) = if negate { (int(-1), int(1)) } else { (int(1), int(-1)) };
        match self {
            Expr::Var(i) => c[i] = pos,
            Expr::Diff(i, j) => {
                c[i] = pos;
                c[j] = neg;
            }
        }
        c
    }
}

/// Relation of the expression to the bound. Strict forms add nothing: on the
/// training points `e < b` selects the same points as `e <= b'` for the next
/// smaller observed value `b'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Cmp {
    Eq,
    Ne,
    Le,
    Ge,
}

impl Cmp {
    const ALL: [Cmp; 4] = [Cmp::Eq, Cmp::Ne, Cmp::Le, Cmp::Ge];

    fn rank(self) -> u8 {
        match self {
            Cmp::Le | Cmp::Ge => 0,
            Cmp::Ne => 1,
            Cmp::Eq => 2,
        }
    }

    /// How much of the space the literal cuts away: hyperplanes are the most specific.
    fn specificity(self) -> u32 {
        match self {
            Cmp::Ne => 0,
            Cmp::Le | Cmp::Ge => 1,
            Cmp::Eq => 2,
        }
    }
}

#[derive(Clone, Debug)]
struct Candidate<V> {
    expr: Expr,
    cmp: Cmp,
    bound: V,
    mask: Bits,
    /// Sort key: wider expressions, larger bounds and weaker relations are
    /// more complex.
    key: (u8, V, u8),
}

impl<V: PoolValue> Candidate<V> {
    /// Tie-break between complete terms: weaker relations first, then fewer
    /// literals pinned to a nonzero constant, which mostly restate observed values.
    fn cost(&self) -> (u32, u32) {
        (self.cmp.specificity(), (self.bound != V::small(0)) as u32)
    }

    fn to_literal(&self, arity: usize) -> LinearLiteral {
        let bound = self.bound.to_rational();
        let (negate, relation, bound) = match self.cmp {
            Cmp::Eq => (false, Relation::Eq, bound),
            Cmp::Ne => (false, Relation::Ne, bound),
            Cmp::Le => (false, Relation::Le, bound),
            Cmp::Ge => (true, Relation::Le, -bound),
        };
        LinearLiteral::new(self.expr.coefficients(arity, negate), relation, bound)
            .expect("pool literals are nonzero")
    }
}

fn build_pool<V: PoolValue>(
    points: &[Vec<V>],
    data: &TrainingData<'_>,
    budget: &LearnerBudget,
) -> Vec<Candidate<V>> {
    let vars = data.arity + 1;
    let mut exprs: Vec<Expr> = (0..vars).map(Expr::Var).collect();
    for i in 0..vars {
        for j in (i + 1)..vars {
            exprs.push(Expr::Diff(i, j));
        }
    }
    let n = points.len();
    let all = Bits::full(n);
    let none = Bits::empty(n);
    let mut pool = Vec::new();
    for expr in exprs {
        let values: Vec<V> = points.iter().map(|p| expr.eval(p)).collect();
        let mut distinct = values.clone();
        distinct.sort();
        distinct.dedup();
        let mut eq = alloc::vec![Bits::empty(n); distinct.len()];
        for (i, v) in values.iter().enumerate() {
            let k = distinct.binary_search(v).expect("value is present");
            eq[k].set(i);
        }
        // le[k]: points whose value is at most distinct[k]
        let mut le: Vec<Bits> = Vec::with_capacity(distinct.len());
        for (k, m) in eq.iter().enumerate() {
            le.push(if k == 0 { m.clone() } else { le[k - 1].or(m) });
        }
        let mut bounds = distinct.clone();
        bounds.extend((budget.small_constants.0..=budget.small_constants.1).map(V::small));
        bounds.sort();
        bounds.dedup();
        for bound in bounds {
            let pos = distinct.partition_point(|v| *v < bound);
            let hit = pos < distinct.len() && distinct[pos] == bound;
            let below = if pos == 0 { none.clone() } else { le[pos - 1].clone() };
            let at = if hit { eq[pos].clone() } else { none.clone() };
            let at_most = if hit { le[pos].clone() } else { below.clone() };
            for cmp in Cmp::ALL {
                if !budget.equalities && matches!(cmp, Cmp::Eq | Cmp::Ne) {
                    continue;
                }
                let mask = match cmp {
                    Cmp::Eq => at.clone(),
                    Cmp::Ne => all.and_not(&at),
                    Cmp::Le => at_most.clone(),
                    Cmp::Ge => all.and_not(&below),
                };
                // useless unless it keeps a failing point and drops a passing one
                if !mask.intersects(&data.failing) || mask.is_superset(&data.passing) {
                    continue;
                }
                pool.push(Candidate {
                    expr,
                    cmp,
                    key: (expr.width(), bound.magnitude(), cmp.rank()),
                    bound: bound.clone(),
                    mask,
                });
            }
        }
    }
    let simpler = |a: &Candidate<V>, b: &Candidate<V>| {
        a.key
            .cmp(&b.key)
            .then_with(|| a.expr.cmp(&b.expr))
            .then_with(|| a.cmp.cmp(&b.cmp))
            .then_with(|| a.bound.cmp(&b.bound))
    };
    // order by simplicity, then keep the simplest literal per mask
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_unstable_by(|&i, &j| simpler(&pool[i], &pool[j]));
    let mut seen = BTreeSet::new();
    order.retain(|&i| seen.insert(pool[i].mask.clone()));
    let mut slots: Vec<Option<Candidate<V>>> = pool.into_iter().map(Some).collect();
    order
        .into_iter()
        .map(|i| slots[i].take().expect("indices are unique"))
        .collect()
}

#[derive(Clone, Debug)]
struct Partial {
    lits: Vec<usize>,
    mask: Bits,
}

struct CoverState {
    terms: Vec<Vec<usize>>,
    uncovered: Bits,
    stuck: bool,
}

struct OutOfBudget;

/// Beam search for the conjunction that excludes every passing point and covers
/// the most of `uncovered`; ties go to the less specific term. The search is
/// resumable, so asking for one more literal extends the previous run.
fn add_cost(a: (u32, u32), b: (u32, u32)) -> (u32, u32) {
    (a.0 + b.0, a.1 + b.1)
}

struct Beam {
    beam: Vec<Partial>,
    depth: usize,
    /// (coverage, summed literal cost, literals)
    best: Option<(u32, (u32, u32), Vec<usize>)>,
    /// `best_at[d - 1]`: the best term with at most `d` literals.
    best_at: Vec<Option<Vec<usize>>>,
}

impl Beam {
    fn new(n: usize) -> Self {
        Self {
            beam: alloc::vec![Partial {
                lits: Vec::new(),
                mask: Bits::full(n),
            }],
            depth: 0,
            best: None,
            best_at: Vec::new(),
        }
    }

    fn step<V: PoolValue>(
        &mut self,
        pool: &[Candidate<V>],
        data: &TrainingData<'_>,
        budget: &LearnerBudget,
        evaluations: &mut usize,
        uncovered: &Bits,
    ) -> Result<(), OutOfBudget> {
        self.depth += 1;
        // (score, passing count, complexity, beam entry, literal)
        let mut next: Vec<(i64, u32, usize, usize, usize)> = Vec::new();
        for (bi, entry) in self.beam.iter().enumerate() {
            let base: usize = entry.lits.iter().sum();
            let base_cost = entry.lits.iter().fold((0, 0), |acc, &i| add_cost(acc, pool[i].cost()));
            let entry_cov = entry.mask.count_and3(uncovered, uncovered);
            let entry_pass = entry.mask.count_and3(&data.passing, &data.passing);
            for (li, cand) in pool.iter().enumerate() {
                if entry.lits.contains(&li) {
                    continue;
                }
                *evaluations += 1;
                if *evaluations > budget.max_evaluations {
                    return Err(OutOfBudget);
                }
                let cov = entry.mask.count_and3(&cand.mask, uncovered);
                if cov == 0 || self.best.as_ref().is_some_and(|(b, _, _)| cov < *b) {
                    continue;
                }
                let pass = entry.mask.count_and3(&cand.mask, &data.passing);
                if pass == 0 {
                    let cost = add_cost(base_cost, cand.cost());
                    if self
                        .best
                        .as_ref()
                        .is_some_and(|(b, bc, _)| cov == *b && cost >= *bc)
                    {
                        continue;
                    }
                    let mut lits = entry.lits.clone();
                    lits.push(li);
                    self.best = Some((cov, cost, lits));
                } else if cov != entry_cov || pass != entry_pass {
                    next.push((cov as i64 - pass as i64, pass, base + li, bi, li));
                }
            }
        }
        let order = |a: &(i64, u32, usize, usize, usize), b: &(i64, u32, usize, usize, usize)| {
            b.0.cmp(&a.0)
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
                .then(a.3.cmp(&b.3))
                .then(a.4.cmp(&b.4))
        };
        // only the head of the ranking is needed; widen it if dedup runs it dry
        let mut seen = BTreeSet::new();
        let mut beam = Vec::with_capacity(budget.beam_width);
        let mut done = 0;
        let mut head = 0;
        while beam.len() < budget.beam_width && done < next.len() {
            if done == head {
                head = (head.max(budget.beam_width) * 2).min(next.len());
                let rest = &mut next[done..];
                let k = head - done;
                if k < rest.len() {
                    rest.select_nth_unstable_by(k - 1, order);
                }
                rest[..k].sort_unstable_by(order);
            }
            let (_, _, _, bi, li) = next[done];
            done += 1;
            let mask = self.beam[bi].mask.and(&pool[li].mask);
            if seen.insert(mask.clone()) {
                let mut lits = self.beam[bi].lits.clone();
                lits.push(li);
                beam.push(Partial { lits, mask });
            }
        }
        self.beam = beam;
        self.best_at.push(self.best.as_ref().map(|b| b.2.clone()));
        Ok(())
    }
}

struct Search<'d, 'a, V> {
    data: &'d TrainingData<'a>,
    budget: &'d LearnerBudget,
    pool: Vec<Candidate<V>>,
    evaluations: usize,
    beams: BTreeMap<Bits, Beam>,
}

impl<'d, 'a, V: PoolValue> Search<'d, 'a, V> {
    fn new(
        points: &[Vec<V>],
        data: &'d TrainingData<'a>,
        budget: &'d LearnerBudget,
        shuffle: Option<u64>,
    ) -> Self {
        let mut pool = build_pool(points, data, budget);
        if let Some(seed) = shuffle {
            let mut rng = SessionRng::seeded(seed);
            for i in (1..pool.len()).rev() {
                pool.swap(i, rng.index(i + 1));
            }
        }
        Self {
            data,
            budget,
            pool,
            evaluations: 0,
            beams: BTreeMap::new(),
        }
    }

    /// Best term of at most `h` literals for the failing points in `uncovered`.
    fn best_term(&mut self, uncovered: &Bits, h: usize) -> Result<Option<Vec<usize>>, OutOfBudget> {
        let n = self.data.points.len();
        let beam = self
            .beams
            .entry(uncovered.clone())
            .or_insert_with(|| Beam::new(n));
        while beam.depth < h {
            beam.step(&self.pool, self.data, self.budget, &mut self.evaluations, uncovered)?;
        }
        Ok(beam.best_at[h - 1].clone())
    }

    fn run(mut self) -> Option<Formula> {
        let mut states: Vec<CoverState> = (0..self.budget.max_literals)
            .map(|_| CoverState {
                terms: Vec::new(),
                uncovered: self.data.failing.clone(),
                stuck: false,
            })
            .collect();
        let n = self.data.points.len();
        for k in 1..=self.budget.max_terms {
            for h in 1..=self.budget.max_literals {
                let mut state = core::mem::replace(
                    &mut states[h - 1],
                    CoverState {
                        terms: Vec::new(),
                        uncovered: Bits::empty(n),
                        stuck: true,
                    },
                );
                while !state.stuck && !state.uncovered.is_empty() && state.terms.len() < k {
                    match self.best_term(&state.uncovered, h) {
                        Ok(Some(term)) => {
                            let mask = term_mask(&self.pool, &term, n);
                            state.uncovered = state.uncovered.and_not(&mask);
                            state.terms.push(term);
                        }
                        Ok(None) => state.stuck = true,
                        Err(OutOfBudget) => return None,
                    }
                }
                if state.uncovered.is_empty() && state.terms.len() <= k {
                    return Some(self.to_formula(&state.terms));
                }
                states[h - 1] = state;
            }
        }
        None
    }

    fn to_formula(&self, terms: &[Vec<usize>]) -> Formula {
        let arity = self.data.arity;
        let terms = terms
            .iter()
            .map(|lits| {
                let mut lits = lits.clone();
                lits.sort_unstable();
                Term::new(lits.iter().map(|&i| self.pool[i].to_literal(arity)).collect())
                    .expect("nonempty term")
            })
            .collect();
        Formula::Dnf(terms)
    }
}

fn term_mask<V>(pool: &[Candidate<V>], lits: &[usize], n: usize) -> Bits {
    lits.iter().fold(Bits::full(n), |m, &i| m.and(&pool[i].mask))
}
