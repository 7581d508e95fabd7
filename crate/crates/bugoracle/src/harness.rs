//! Repeated simulated sessions over built-in or external subjects, scored
//! against a golden-labeled validation grid.

use std::io;
use std::time::Instant;

use bugoracle_core::metrics::{effort_metrics, mean, median};
use bugoracle_core::number::to_f64;
use bugoracle_core::rng::derive_seed;
use bugoracle_core::{
    conditional_accuracy, prediction_accuracy, ActiveLoop, InputVector, Rational, SessionConfig,
    SimulatedHumanOracle, Subject, Termination, ValidationSuite,
};
use num_bigint::BigInt;
use rayon::prelude::*;

use crate::clock::WallClock;

pub type BoxedSubject = Box<dyn Subject + Send + Sync>;

/// A buggy program, its golden version, a failing input and the validation grid.
pub struct ExperimentSubject {
    pub name: String,
    pub buggy: BoxedSubject,
    pub golden: BoxedSubject,
    pub seed_input: InputVector,
    pub validation: ValidationSuite,
}

impl ExperimentSubject {
    /// Validation set: the grid `[lo, hi]^arity` labeled by `golden`, seed excluded.
    pub fn with_grid(
        name: impl Into<String>,
        buggy: BoxedSubject,
        golden: BoxedSubject,
        seed_input: InputVector,
        grid: (i64, i64),
    ) -> Result<Self, bugoracle_core::MetricError> {
        let validation = ValidationSuite::from_grid(
            &*buggy,
            &*golden,
            grid.0,
            grid.1,
            std::slice::from_ref(&seed_input),
        )?;
        Ok(Self {
            name: name.into(),
            buggy,
            golden,
            seed_input,
            validation,
        })
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub l_values: Vec<usize>,
    pub reps: usize,
    /// Repetition `r` runs with `derive_seed(base_seed, r)` for every subject and `l`.
    pub base_seed: u64,
    /// Committee size, timeout, mutation and learner settings shared by all runs.
    pub session: SessionConfig,
    /// Record wall time; off makes the CSV byte-reproducible.
    pub record_wall: bool,
}

impl ExperimentConfig {
    pub fn new(arity: usize) -> Self {
        Self {
            l_values: vec![10, 20, 30],
            reps: 30,
            base_seed: 0,
            session: SessionConfig::new(arity),
            record_wall: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunMetrics {
    pub accuracy: Rational,
    pub cond_accuracy: Rational,
    pub generated: usize,
    pub labeled: usize,
    pub labeled_failing: usize,
    /// Generated tests the golden version calls failing.
    pub generated_failing: usize,
    /// `None` when nothing was generated.
    pub p_labeled: Option<Rational>,
    pub p_label_failing: Option<Rational>,
    pub p_generate_failing: Option<Rational>,
    pub termination: Termination,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub subject: String,
    pub l: usize,
    pub rep: usize,
    pub seed: u64,
    pub outcome: Result<RunMetrics, String>,
    pub wall_ms: Option<u128>,
}

fn ratio(num: usize, den: usize) -> Option<Rational> {
    (den > 0).then(|| Rational::new(BigInt::from(num), BigInt::from(den)))
}

/// Runs one simulated session and scores it.
pub fn run_one(subject: &ExperimentSubject, config: &SessionConfig) -> Result<RunMetrics, String> {
    let golden: &dyn Subject = &*subject.golden;
    let mut human = SimulatedHumanOracle::new(golden);
    let clock = WallClock::start();
    let result = ActiveLoop::new(config, &*subject.buggy)
        .clock(&clock)
        .reference(golden)
        .run(subject.seed_input.clone(), &mut human)
        .map_err(|e| e.to_string())?;
    let tests = subject.validation.tests();
    let accuracy = prediction_accuracy(result.oracle.formula(), tests).map_err(|e| e.to_string())?;
    let cond_accuracy = conditional_accuracy(result.oracle.formula(), tests).map_err(|e| e.to_string())?;
    let (generated_failing, p_labeled, p_generate_failing) = match effort_metrics(&result.events) {
        Ok(m) => (
            m.generated_failing.unwrap_or(0),
            Some(m.p_labeled),
            m.p_generate_failing,
        ),
        Err(_) => (0, None, None),
    };
    Ok(RunMetrics {
        accuracy,
        cond_accuracy,
        generated: result.counts.generated,
        labeled: result.counts.labeled,
        labeled_failing: result.counts.labeled_failing,
        generated_failing,
        p_labeled,
        p_label_failing: ratio(result.counts.labeled_failing, result.counts.labeled),
        p_generate_failing,
        termination: result.termination,
    })
}

/// One row per (subject, l, repetition), sorted by that key.
pub fn run_experiment(subjects: &[ExperimentSubject], config: &ExperimentConfig) -> Vec<RunReport> {
    let mut jobs = Vec::new();
    for (s, _) in subjects.iter().enumerate() {
        for &l in &config.l_values {
            for rep in 0..config.reps {
                jobs.push((s, l, rep));
            }
        }
    }
    let mut rows: Vec<RunReport> = jobs
        .into_par_iter()
        .map(|(s, l, rep)| {
            let subject = &subjects[s];
            let seed = derive_seed(config.base_seed, rep as u64);
            let mut session = config.session.clone();
            session.budget_l = l;
            session.rng_seed = seed;
            session.arity = subject.seed_input.arity();
            let start = Instant::now();
            let outcome = run_one(subject, &session);
            RunReport {
                subject: subject.name.clone(),
                l,
                rep,
                seed,
                outcome,
                wall_ms: config.record_wall.then(|| start.elapsed().as_millis()),
            }
        })
        .collect();
    rows.sort_by(|a, b| (&a.subject, a.l, a.rep).cmp(&(&b.subject, b.l, b.rep)));
    rows
}

fn num(value: &Rational) -> String {
    to_f64(value).to_string()
}

fn opt(value: &Option<Rational>) -> String {
    value.as_ref().map(num).unwrap_or_default()
}

pub const RUN_HEADER: [&str; 14] = [
    "subject",
    "l",
    "rep",
    "seed",
    "accuracy",
    "cond_accuracy",
    "generated",
    "labeled",
    "labeled_failing",
    "p_labeled",
    "p_label_failing",
    "p_generate_failing",
    "wall_ms",
    "status",
];

pub fn write_runs_csv<W: io::Write>(rows: &[RunReport], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUN_HEADER)?;
    for r in rows {
        let wall = r.wall_ms.map(|ms| ms.to_string()).unwrap_or_default();
        let mut record = vec![r.subject.clone(), r.l.to_string(), r.rep.to_string(), r.seed.to_string()];
        match &r.outcome {
            Ok(m) => {
                record.extend([
                    num(&m.accuracy),
                    num(&m.cond_accuracy),
                    m.generated.to_string(),
                    m.labeled.to_string(),
                    m.labeled_failing.to_string(),
                    opt(&m.p_labeled),
                    opt(&m.p_label_failing),
                    opt(&m.p_generate_failing),
                    wall,
                    "ok".to_string(),
                ]);
            }
            Err(e) => {
                record.extend(std::iter::repeat_n(String::new(), 8));
                record.extend([wall, format!("error: {e}")]);
            }
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Medians, means and pooled proportions for one (subject, l) group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummaryRow {
    pub subject: String,
    pub l: usize,
    pub runs: usize,
    pub errors: usize,
    pub median_accuracy: Option<Rational>,
    pub mean_accuracy: Option<Rational>,
    pub median_cond_accuracy: Option<Rational>,
    pub mean_cond_accuracy: Option<Rational>,
    pub median_p_labeled: Option<Rational>,
    pub median_p_label_failing: Option<Rational>,
    pub median_p_generate_failing: Option<Rational>,
    /// Sum of failing labels over sum of labels across runs.
    pub pooled_p_label_failing: Option<Rational>,
    /// Sum of failing generated tests over sum of generated tests across runs.
    pub pooled_p_generate_failing: Option<Rational>,
}

pub fn summarize(rows: &[RunReport]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, usize)> = rows.iter().map(|r| (r.subject.clone(), r.l)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(subject, l)| {
            let group: Vec<&RunReport> = rows.iter().filter(|r| r.subject == subject && r.l == l).collect();
            let ok: Vec<&RunMetrics> = group.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
            let collect = |f: &dyn Fn(&RunMetrics) -> Option<Rational>| -> Vec<Rational> {
                ok.iter().filter_map(|m| f(m)).collect()
            };
            let acc = collect(&|m| Some(m.accuracy.clone()));
            let cond = collect(&|m| Some(m.cond_accuracy.clone()));
            let sum = |f: &dyn Fn(&RunMetrics) -> usize| ok.iter().map(|m| f(m)).sum::<usize>();
            SummaryRow {
                runs: group.len(),
                errors: group.len() - ok.len(),
                median_accuracy: median(&acc),
                mean_accuracy: mean(&acc),
                median_cond_accuracy: median(&cond),
                mean_cond_accuracy: mean(&cond),
                median_p_labeled: median(&collect(&|m| m.p_labeled.clone())),
                median_p_label_failing: median(&collect(&|m| m.p_label_failing.clone())),
                median_p_generate_failing: median(&collect(&|m| m.p_generate_failing.clone())),
                pooled_p_label_failing: ratio(sum(&|m| m.labeled_failing), sum(&|m| m.labeled)),
                pooled_p_generate_failing: ratio(sum(&|m| m.generated_failing), sum(&|m| m.generated)),
                subject,
                l,
            }
        })
        .collect()
}

pub fn write_summary_csv<W: io::Write>(summary: &[SummaryRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "subject",
        "l",
        "runs",
        "errors",
        "median_accuracy",
        "mean_accuracy",
        "median_cond_accuracy",
        "mean_cond_accuracy",
        "median_p_labeled",
        "median_p_label_failing",
        "median_p_generate_failing",
        "pooled_p_label_failing",
        "pooled_p_generate_failing",
    ])?;
    for s in summary {
        w.write_record([
            s.subject.clone(),
            s.l.to_string(),
            s.runs.to_string(),
            s.errors.to_string(),
            opt(&s.median_accuracy),
            opt(&s.mean_accuracy),
            opt(&s.median_cond_accuracy),
            opt(&s.mean_cond_accuracy),
            opt(&s.median_p_labeled),
            opt(&s.median_p_label_failing),
            opt(&s.median_p_generate_failing),
            opt(&s.pooled_p_label_failing),
            opt(&s.pooled_p_generate_failing),
        ])?;
    }
    w.flush()?;
    Ok(())
}
