//! Labeled suites on disk.
//!
//! A suite directory holds `manifest.json` plus, per test `N` (1-based, in
//! suite order), `tN.in` with the input line and, when the label carries an
//! expected output, `tN.expected`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use bugoracle_core::number::{format_number, format_numbers, parse_number, parse_numbers};
use bugoracle_core::{InputVector, Label, LabeledTest, ModelError, Source, TestCase, Verdict};
use serde::{Deserialize, Serialize};

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub subject: String,
    pub arity: usize,
    pub tests: Vec<ManifestEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: usize,
    pub input: String,
    pub output: String,
    pub verdict: VerdictText,
    pub source: String,
    /// Absent when the labeler gave no expected output.
    pub expected: Option<String>,
    pub expected_missing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictText {
    Pass,
    Fail,
}

impl From<Verdict> for VerdictText {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Passing => VerdictText::Pass,
            Verdict::Failing => VerdictText::Fail,
        }
    }
}

impl From<VerdictText> for Verdict {
    fn from(v: VerdictText) -> Self {
        match v {
            VerdictText::Pass => Verdict::Passing,
            VerdictText::Fail => Verdict::Failing,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("test {id}: {reason}")]
    Invalid { id: usize, reason: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SuiteError + '_ {
    move |source| SuiteError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn input_file(id: usize) -> String {
    format!("t{id}.in")
}

pub fn expected_file(id: usize) -> String {
    format!("t{id}.expected")
}

/// Manifest entries in suite order.
pub fn manifest_of(subject: &str, arity: usize, suite: &[LabeledTest]) -> Manifest {
    let tests = suite
        .iter()
        .enumerate()
        .map(|(i, t)| ManifestEntry {
            id: i + 1,
            input: input_file(i + 1),
            output: format_number(&t.test.output),
            verdict: t.verdict().into(),
            source: t.source.as_str().to_string(),
            expected: t.label.expected_output.as_ref().map(|_| expected_file(i + 1)),
            expected_missing: t.label.expected_output.is_none(),
        })
        .collect();
    Manifest {
        subject: subject.to_string(),
        arity,
        tests,
    }
}

/// Writes the suite into `dir`, creating it if needed.
pub fn export_suite(
    suite: &[LabeledTest],
    subject: &str,
    arity: usize,
    dir: &Path,
) -> Result<Manifest, SuiteError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let manifest = manifest_of(subject, arity, suite);
    for (entry, t) in manifest.tests.iter().zip(suite) {
        let path = dir.join(&entry.input);
        fs::write(&path, format!("{}\n", format_numbers(t.test.input.values()))).map_err(io_err(&path))?;
        if let (Some(name), Some(expected)) = (&entry.expected, &t.label.expected_output) {
            let path = dir.join(name);
            fs::write(&path, format!("{}\n", format_number(expected))).map_err(io_err(&path))?;
        }
    }
    let path = dir.join(MANIFEST);
    fs::write(&path, manifest_json(&manifest)).map_err(io_err(&path))?;
    Ok(manifest)
}

pub fn manifest_json(manifest: &Manifest) -> String {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    text
}

/// Reads a suite written by [`export_suite`].
pub fn import_suite(dir: &Path) -> Result<(Manifest, Vec<LabeledTest>), SuiteError> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|source| SuiteError::Json {
        path: path.clone(),
        source,
    })?;
    let mut suite = Vec::with_capacity(manifest.tests.len());
    for entry in &manifest.tests {
        let invalid = |reason: String| SuiteError::Invalid { id: entry.id, reason };
        let path = dir.join(&entry.input);
        let line = fs::read_to_string(&path).map_err(io_err(&path))?;
        let values = parse_numbers(&line).map_err(|e| invalid(e.to_string()))?;
        let input = InputVector::new(values).map_err(|e| invalid(e.to_string()))?;
        if input.arity() != manifest.arity {
            return Err(invalid(
                ModelError::Arity {
                    expected: manifest.arity,
                    found: input.arity(),
                }
                .to_string(),
            ));
        }
        let output = parse_number(&entry.output).map_err(|e| invalid(e.to_string()))?;
        let expected_output = match &entry.expected {
            Some(name) => {
                let path = dir.join(name);
                let text = fs::read_to_string(&path).map_err(io_err(&path))?;
                Some(parse_number(&text).map_err(|e| invalid(e.to_string()))?)
            }
            None => None,
        };
        let source = Source::parse(&entry.source)
            .ok_or_else(|| invalid(format!("unknown source `{}`", entry.source)))?;
        let label = Label {
            verdict: entry.verdict.into(),
            expected_output,
        };
        let test = LabeledTest::new(TestCase::new(input, output), label, source)
            .map_err(|e| invalid(e.to_string()))?;
        suite.push(test);
    }
    Ok((manifest, suite))
}
