//! Host side of `bugoracle-core`: external programs as subjects, suite and
//! event files, the experiment harness, the HTTP labeling service and the
//! `bugoracle` command line.

pub mod cli;
pub mod clock;
pub mod events;
pub mod harness;
pub mod interactive;
pub mod oracle_file;
pub mod server;
pub mod subject;
pub mod suite;

pub use clock::WallClock;
pub use harness::{run_experiment, summarize, ExperimentConfig, ExperimentSubject, RunReport};
pub use interactive::{InteractiveOracle, LabelChannel, SessionStatus, StatusObserver};
pub use subject::{ExternalSubject, SubjectSpec};
pub use suite::{export_suite, import_suite, Manifest};
