//! External programs as subjects, and the textual subject selector.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use bugoracle_core::number::{format_numbers, parse_number, parse_numbers};
use bugoracle_core::{Builtin, InputVector, Rational, Subject, SubjectError};

/// Default per-execution limit for external programs.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);

const POLL: Duration = Duration::from_millis(2);

/// A program run through `sh -c`. The input vector is written to stdin as one
/// line of space-separated decimals; stdout must hold exactly one number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExternalSubject {
    command: String,
    arity: usize,
    timeout: Duration,
}

impl ExternalSubject {
    pub fn new(command: impl Into<String>, arity: usize) -> Self {
        Self {
            command: command.into(),
            arity,
            timeout: DEFAULT_TIMEOUT,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn command(&self) -> &str {
        &self.command
    }
}

impl Subject for ExternalSubject {
    fn arity(&self) -> usize {
        self.arity
    }

    fn execute(&self, input: &InputVector) -> Result<Rational, SubjectError> {
        let crash = |detail: String| SubjectError::Crash { status: None, detail };
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| crash(format!("spawn failed: {e}")))?;

        let line = format!("{}\n", format_numbers(input.values()));
        let mut stdin = child.stdin.take().expect("piped stdin");
        let writer = thread::spawn(move || {
            // a program that exits without reading closes the pipe early
            let _ = stdin.write_all(line.as_bytes());
        });
        let mut stdout = child.stdout.take().expect("piped stdout");
        let reader = thread::spawn(move || {
            let mut out = Vec::new();
            let _ = stdout.read_to_end(&mut out);
            out
        });

        let deadline = Instant::now() + self.timeout;
        let status = loop {
            match child.try_wait() {
                Ok(Some(status)) => break status,
                Ok(None) if Instant::now() >= deadline => {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(SubjectError::Timeout);
                }
                Ok(None) => thread::sleep(POLL),
                Err(e) => return Err(crash(format!("wait failed: {e}"))),
            }
        };
        let _ = writer.join();
        let out = reader.join().unwrap_or_default();
        if !status.success() {
            return Err(SubjectError::Crash {
                status: status.code(),
                detail: format!("`{}` exited with {status}", self.command),
            });
        }
        let text = String::from_utf8_lossy(&out);
        let mut tokens = text.split_whitespace();
        match (tokens.next(), tokens.next()) {
            (Some(tok), None) => {
                parse_number(tok).map_err(|e| SubjectError::OutputFormat(e.to_string()))
            }
            _ => Err(SubjectError::OutputFormat(format!(
                "expected one number, got `{}`",
                text.trim()
            ))),
        }
    }

    fn name(&self) -> String {
        self.command.clone()
    }
}

/// `builtin:<id>` or a shell command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubjectSpec {
    Builtin(Builtin),
    External(String),
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("unknown builtin subject `{0}`")]
    UnknownBuiltin(String),
    #[error("empty subject command")]
    Empty,
    #[error("external subject `{0}` needs --arity")]
    MissingArity(String),
    #[error("subject `{name}` has arity {actual}, but --arity is {given}")]
    ArityMismatch {
        name: String,
        actual: usize,
        given: usize,
    },
    #[error("no golden version known for `{0}`; pass --golden")]
    NoGolden(String),
    #[error("no default failing input for `{0}`; pass --seed-input")]
    NoSeed(String),
    #[error("invalid input `{text}`: {reason}")]
    Input { text: String, reason: String },
}

impl SubjectSpec {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let text = text.trim();
        if let Some(id) = text.strip_prefix("builtin:") {
            return Builtin::from_id(id)
                .map(SubjectSpec::Builtin)
                .ok_or_else(|| SpecError::UnknownBuiltin(id.to_string()));
        }
        if text.is_empty() {
            return Err(SpecError::Empty);
        }
        Ok(SubjectSpec::External(text.to_string()))
    }

    /// Resolves the arity: builtins know theirs, external commands need `given`.
    pub fn arity(&self, given: Option<usize>) -> Result<usize, SpecError> {
        match (self, given) {
            (SubjectSpec::Builtin(b), None) => Ok(b.arity()),
            (SubjectSpec::Builtin(b), Some(n)) if n == b.arity() => Ok(n),
            (SubjectSpec::Builtin(b), Some(n)) => Err(SpecError::ArityMismatch {
                name: self.to_string(),
                actual: b.arity(),
                given: n,
            }),
            (SubjectSpec::External(_), Some(n)) => Ok(n),
            (SubjectSpec::External(cmd), None) => Err(SpecError::MissingArity(cmd.clone())),
        }
    }

    pub fn instantiate(
        &self,
        arity: Option<usize>,
        timeout: Duration,
    ) -> Result<Box<dyn Subject + Send + Sync>, SpecError> {
        let n = self.arity(arity)?;
        Ok(match self {
            SubjectSpec::Builtin(b) => Box::new(*b),
            SubjectSpec::External(cmd) => Box::new(ExternalSubject::new(cmd.clone(), n).with_timeout(timeout)),
        })
    }

    /// The golden version paired with a builtin buggy subject.
    pub fn default_golden(&self) -> Result<SubjectSpec, SpecError> {
        match self {
            SubjectSpec::Builtin(b) => b
                .golden()
                .map(SubjectSpec::Builtin)
                .ok_or_else(|| SpecError::NoGolden(self.to_string())),
            SubjectSpec::External(_) => Err(SpecError::NoGolden(self.to_string())),
        }
    }

    /// A known failing input of a builtin buggy subject.
    pub fn default_seed(&self) -> Result<InputVector, SpecError> {
        let values: &[i64] = match self {
            SubjectSpec::Builtin(Builtin::TriangleSteve) => &[2, 2, 2],
            SubjectSpec::Builtin(Builtin::AbsBuggy) => &[-3],
            SubjectSpec::Builtin(Builtin::MaxBuggy) => &[1, 2],
            _ => return Err(SpecError::NoSeed(self.to_string())),
        };
        Ok(InputVector::from_ints(values).expect("nonempty"))
    }

    /// Inclusive per-variable range of the default validation grid.
    pub fn default_grid(&self) -> (i64, i64) {
        match self {
            SubjectSpec::Builtin(Builtin::AbsBuggy) => (-10, 10),
            SubjectSpec::Builtin(Builtin::MaxBuggy) => (-6, 6),
            _ => (1, 6),
        }
    }
}

impl std::fmt::Display for SubjectSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SubjectSpec::Builtin(b) => write!(f, "builtin:{}", b.id()),
            SubjectSpec::External(cmd) => f.write_str(cmd),
        }
    }
}

/// Parses a space-separated input line such as `"2 2 2"`.
pub fn parse_input(text: &str) -> Result<InputVector, SpecError> {
    let err = |reason: String| SpecError::Input {
        text: text.to_string(),
        reason,
    };
    let values = parse_numbers(text).map_err(|e| err(e.to_string()))?;
    InputVector::new(values).map_err(|e| err(e.to_string()))
}

/// Parses an inclusive range `lo..hi`.
pub fn parse_range(text: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| format!("expected `lo..hi`, got `{text}`"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if lo > hi {
        return Err(format!("empty range `{text}`"));
    }
    Ok((lo, hi))
}
