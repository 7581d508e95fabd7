//! JSON forms of session events. Numbers are exact decimal strings.

use std::fs;
use std::path::Path;

use bugoracle_core::number::format_number;
use bugoracle_core::{GenerationEvent, Label, TestCase};
use serde::{Deserialize, Serialize};

use crate::suite::VerdictText;

pub const EVENTS: &str = "events.jsonl";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub iter: usize,
    pub parent: usize,
    pub input: Vec<String>,
    pub output: String,
    pub decision: DecisionRecord,
    pub queried: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<LabelRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite_index: Option<usize>,
    /// Ground truth from the golden version, when one was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<VerdictText>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub shortcut: bool,
    pub votes: Option<u32>,
    pub theta_hat: Option<String>,
    pub members: u32,
    pub abstained: u32,
    pub sent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub verdict: VerdictText,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_output: Option<String>,
}

impl From<&Label> for LabelRecord {
    fn from(label: &Label) -> Self {
        Self {
            verdict: label.verdict.into(),
            expected_output: label.expected_output.as_ref().map(format_number),
        }
    }
}

pub fn input_strings(test: &TestCase) -> Vec<String> {
    test.input.values().iter().map(format_number).collect()
}

impl From<&GenerationEvent> for EventRecord {
    fn from(e: &GenerationEvent) -> Self {
        Self {
            iter: e.iter,
            parent: e.parent,
            input: input_strings(&e.test),
            output: format_number(&e.test.output),
            decision: DecisionRecord {
                shortcut: e.decision.shortcut,
                votes: e.decision.votes,
                theta_hat: e.decision.theta_hat.as_ref().map(format_number),
                members: e.decision.members,
                abstained: e.decision.abstained,
                sent: e.decision.send_to_human,
            },
            queried: e.queried,
            label: e.label.as_ref().map(LabelRecord::from),
            suite_index: e.suite_index,
            truth: e.truth.map(Into::into),
        }
    }
}

/// One JSON object per line.
pub fn events_jsonl(events: &[GenerationEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(&EventRecord::from(e)).expect("event serializes"));
        out.push('\n');
    }
    out
}

pub fn write_events(events: &[GenerationEvent], path: &Path) -> std::io::Result<()> {
    fs::write(path, events_jsonl(events))
}
