//! The `bugoracle` command line.

use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use bugoracle_core::number::to_f64;
use bugoracle_core::{
    conditional_accuracy, formula_to_text, prediction_accuracy, validation_score, ActiveLoop,
    HumanOracle, InputVector, Label, LabeledTest, SessionConfig, SessionResult,
    SimulatedHumanOracle, Source, Subject, TestCase,
};
use clap::{Parser, Subcommand, ValueEnum};

use crate::clock::WallClock;
use crate::events::write_events;
use crate::harness::{
    run_experiment, summarize, write_runs_csv, write_summary_csv, ExperimentConfig,
    ExperimentSubject,
};
use crate::interactive::{
    lock_status, InteractiveOracle, LabelChannel, RunState, SessionStatus, StatusObserver,
    TerminalOracle,
};
use crate::oracle_file::{read_formula, write_oracle};
use crate::server::{router, AppState};
use crate::subject::{parse_input, parse_range, SubjectSpec};
use crate::suite::{export_suite, import_suite, manifest_json, manifest_of};

#[derive(Debug, Parser)]
#[command(name = "bugoracle", version, about = "Learn a bug oracle from one failing test")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one labeling session.
    Run(RunArgs),
    /// Repeat simulated sessions and write per-run and summary CSV.
    Experiment(ExperimentArgs),
    /// Share of grid or suite inputs on which a patched program matches the golden one.
    Score(ScoreArgs),
    /// Accuracy of a stored oracle against a validation suite.
    EvalOracle(EvalOracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    /// The golden version answers every query.
    Simulated,
    /// A person answers, over HTTP with --serve or else on the terminal.
    Interactive,
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// `builtin:<id>` or a shell command reading one input line from stdin.
    #[arg(long)]
    pub subject: String,
    /// Golden version for the simulated oracle; builtins default to their pair.
    #[arg(long)]
    pub golden: Option<String>,
    /// Number of inputs; required for external subjects.
    #[arg(long)]
    pub arity: Option<usize>,
    /// The failing input, space separated, e.g. "2 2 2".
    #[arg(long)]
    pub seed_input: String,
    /// Maximum labeled suite size, seed included.
    #[arg(long, default_value_t = 30)]
    pub budget: usize,
    /// Committee pairs per decision.
    #[arg(long, default_value_t = 10)]
    pub committee: usize,
    /// Session timeout in seconds.
    #[arg(long, default_value_t = 600)]
    pub timeout: u64,
    /// Per-execution timeout of external subjects, in seconds.
    #[arg(long, default_value_t = 5)]
    pub exec_timeout: u64,
    #[arg(long, value_enum, default_value_t = OracleMode::Simulated)]
    pub oracle: OracleMode,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    /// Keep fuzzed inputs integral.
    #[arg(long)]
    pub integer_only: bool,
    /// Directory for manifest.json, t<N>.in, events.jsonl and oracle.smt.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Serve the labeling API on this address (interactive mode).
    #[arg(long)]
    pub serve: Option<SocketAddr>,
    /// Serve the console from this directory instead of the built-in page.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
    /// Seconds to keep serving after the session ends.
    #[arg(long, default_value_t = 0)]
    pub linger: u64,
}

#[derive(Debug, clap::Args)]
pub struct ExperimentArgs {
    /// Buggy subjects; repeat the flag for several.
    #[arg(long, default_values_t = ["builtin:triangle-steve".to_string()])]
    pub subject: Vec<String>,
    /// Golden versions, matched to --subject by position.
    #[arg(long)]
    pub golden: Vec<String>,
    /// Failing inputs, matched to --subject by position.
    #[arg(long)]
    pub seed_input: Vec<String>,
    #[arg(long)]
    pub arity: Option<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [10, 20, 30])]
    pub l_values: Vec<usize>,
    #[arg(long, default_value_t = 30)]
    pub reps: usize,
    #[arg(long, default_value_t = 10)]
    pub committee: usize,
    #[arg(long, default_value_t = 600)]
    pub timeout: u64,
    #[arg(long, default_value_t = 5)]
    pub exec_timeout: u64,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    #[arg(long)]
    pub integer_only: bool,
    /// Validation grid per variable, e.g. 1..6; defaults per builtin.
    #[arg(long)]
    pub grid: Option<String>,
    /// Leave wall_ms empty so identical runs give identical files.
    #[arg(long)]
    pub deterministic: bool,
    /// Directory for runs.csv and summary.csv; without it runs go to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub patched: String,
    #[arg(long)]
    pub golden: String,
    #[arg(long)]
    pub arity: Option<usize>,
    /// Validation inputs: every point of this per-variable range.
    #[arg(long, default_value = "1..6")]
    pub grid: String,
    /// Validation inputs from an exported suite instead of the grid.
    #[arg(long)]
    pub suite: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub exec_timeout: u64,
}

#[derive(Debug, clap::Args)]
pub struct EvalOracleArgs {
    /// Formula file, e.g. out/oracle.smt.
    #[arg(long)]
    pub oracle: PathBuf,
    #[arg(long)]
    pub arity: Option<usize>,
    /// Validation suite directory with ground-truth labels.
    #[arg(long, conflicts_with_all = ["subject", "golden"])]
    pub suite: Option<PathBuf>,
    /// Buggy program whose outputs, labeled by --golden over --grid, form the suite.
    #[arg(long, requires = "golden")]
    pub subject: Option<String>,
    #[arg(long)]
    pub golden: Option<String>,
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 5)]
    pub exec_timeout: u64,
}

/// A failure with its exit code: 2 for bad invocations, 1 for failed runs.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

fn usage(message: impl ToString) -> CliError {
    CliError {
        code: 2,
        message: message.to_string(),
    }
}

fn failure(message: impl ToString) -> CliError {
    CliError {
        code: 1,
        message: message.to_string(),
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli, &mut io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => run(args, out),
        Command::Experiment(args) => experiment(args, out),
        Command::Score(args) => score(args, out),
        Command::EvalOracle(args) => eval_oracle(args, out),
    }
}

type Boxed = Box<dyn Subject + Send + Sync>;

fn instantiate(spec: &SubjectSpec, arity: Option<usize>, exec_timeout: u64) -> Result<Boxed, CliError> {
    spec.instantiate(arity, Duration::from_secs(exec_timeout)).map_err(usage)
}

fn parse_spec(text: &str) -> Result<SubjectSpec, CliError> {
    SubjectSpec::parse(text).map_err(usage)
}

fn run(args: RunArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = parse_spec(&args.subject)?;
    let arity = spec.arity(args.arity).map_err(usage)?;
    let subject = instantiate(&spec, Some(arity), args.exec_timeout)?;
    let seed_input = parse_input(&args.seed_input).map_err(usage)?;
    if seed_input.arity() != arity {
        return Err(usage(format!(
            "--seed-input has {} values, the subject takes {arity}",
            seed_input.arity()
        )));
    }
    let golden_spec = match &args.golden {
        Some(g) => Some(parse_spec(g)?),
        None => spec.default_golden().ok(),
    };
    let golden = match &golden_spec {
        Some(g) => Some(instantiate(g, Some(arity), args.exec_timeout)?),
        None => None,
    };
    if args.oracle == OracleMode::Simulated && golden.is_none() {
        return Err(usage("--oracle simulated needs --golden"));
    }
    if args.serve.is_some() && args.oracle != OracleMode::Interactive {
        return Err(usage("--serve needs --oracle interactive"));
    }

    let mut config = SessionConfig::new(arity);
    config.budget_l = args.budget;
    config.committee_s = args.committee;
    config.loop_timeout = Duration::from_secs(args.timeout);
    config.rng_seed = args.rng_seed;
    config.mutation.integer_only = args.integer_only;
    config.confirm_seed = args.oracle == OracleMode::Interactive;
    config.validate().map_err(usage)?;

    let status = Arc::new(Mutex::new(SessionStatus::new(&config, spec.to_string())));
    let deadline = Instant::now() + config.loop_timeout;
    let result = match (args.oracle, args.serve) {
        (OracleMode::Simulated, _) => {
            let golden: &dyn Subject = golden.as_deref().expect("checked above");
            let mut human = SimulatedHumanOracle::new(golden);
            session(&config, &*subject, Some(golden), seed_input, &mut human, &status)
        }
        (OracleMode::Interactive, None) => {
            let stdin = io::stdin();
            let mut human = TerminalOracle::new(stdin.lock(), io::stderr());
            session(&config, &*subject, golden.as_deref().map(|g| g as &dyn Subject), seed_input, &mut human, &status)
        }
        (OracleMode::Interactive, Some(addr)) => serve_session(
            &config,
            subject,
            golden,
            seed_input,
            &status,
            addr,
            args.static_dir.clone(),
            deadline,
            Duration::from_secs(args.linger),
        ),
    };
    let result = result.map_err(failure)?;

    writeln!(
        out,
        "labeled {}/{} ({} failing), generated {}, queries {}, termination {}",
        result.suite.len(),
        config.budget_l,
        result.counts.labeled_failing,
        result.counts.generated,
        result.counts.queries,
        result.termination.as_str()
    )
    .map_err(failure)?;
    writeln!(out, "oracle {}", formula_to_text(result.oracle.formula())).map_err(failure)?;
    if let Some(dir) = &args.out {
        write_outputs(&result, &spec.to_string(), arity, dir).map_err(failure)?;
    }
    Ok(())
}

fn session(
    config: &SessionConfig,
    subject: &dyn Subject,
    reference: Option<&dyn Subject>,
    seed_input: InputVector,
    human: &mut dyn HumanOracle,
    status: &Arc<Mutex<SessionStatus>>,
) -> Result<SessionResult, String> {
    let clock = WallClock::start();
    let mut observer = StatusObserver(status.clone());
    let mut run = ActiveLoop::new(config, subject).clock(&clock).observer(&mut observer);
    if let Some(golden) = reference {
        run = run.reference(golden);
    }
    let result = run.run(seed_input, human);
    let mut s = lock_status(status);
    match &result {
        Ok(r) => {
            s.state = RunState::Complete;
            s.termination = Some(r.termination.as_str().to_string());
        }
        Err(e) => {
            s.state = RunState::Failed;
            s.error = Some(e.to_string());
        }
    }
    result.map_err(|e| e.to_string())
}

#[allow(clippy::too_many_arguments)]
fn serve_session(
    config: &SessionConfig,
    subject: Boxed,
    golden: Option<Boxed>,
    seed_input: InputVector,
    status: &Arc<Mutex<SessionStatus>>,
    addr: SocketAddr,
    static_dir: Option<PathBuf>,
    deadline: Instant,
    linger: Duration,
) -> Result<SessionResult, String> {
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?;
    let channel = LabelChannel::new();
    let app = router(
        AppState {
            channel: channel.clone(),
            status: status.clone(),
        },
        static_dir,
    );
    let listener = runtime
        .block_on(tokio::net::TcpListener::bind(addr))
        .map_err(|e| format!("cannot bind {addr}: {e}"))?;
    let local = listener.local_addr().map_err(|e| e.to_string())?;
    eprintln!("labeling console at http://{local}/");
    let (stop_tx, stop_rx) = tokio::sync::oneshot::channel::<()>();
    let server = runtime.spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = stop_rx.await;
            })
            .await
    });
    let mut human = InteractiveOracle::new(channel.clone(), Some(deadline));
    let result = session(config, &*subject, golden.as_deref().map(|g| g as &dyn Subject), seed_input, &mut human, status);
    channel.close();
    std::thread::sleep(linger);
    let _ = stop_tx.send(());
    let _ = runtime.block_on(server);
    result
}

fn write_outputs(result: &SessionResult, subject: &str, arity: usize, dir: &Path) -> Result<(), String> {
    export_suite(&result.suite, subject, arity, dir).map_err(|e| e.to_string())?;
    write_events(&result.events, &dir.join(crate::events::EVENTS)).map_err(|e| e.to_string())?;
    let manifest = manifest_json(&manifest_of(subject, arity, &result.suite));
    write_oracle(&result.oracle, arity, &manifest, dir).map_err(|e| e.to_string())?;
    Ok(())
}

fn experiment(args: ExperimentArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let grid = args.grid.as_deref().map(parse_range).transpose().map_err(usage)?;
    if args.golden.len() > args.subject.len() || args.seed_input.len() > args.subject.len() {
        return Err(usage("more --golden or --seed-input values than --subject values"));
    }
    let mut subjects = Vec::new();
    for (i, text) in args.subject.iter().enumerate() {
        let spec = parse_spec(text)?;
        let arity = spec.arity(args.arity).map_err(usage)?;
        let golden_spec = match args.golden.get(i) {
            Some(g) => parse_spec(g)?,
            None => spec.default_golden().map_err(usage)?,
        };
        let seed_input = match args.seed_input.get(i) {
            Some(s) => parse_input(s).map_err(usage)?,
            None => spec.default_seed().map_err(usage)?,
        };
        let subject = ExperimentSubject::with_grid(
            spec.to_string(),
            instantiate(&spec, Some(arity), args.exec_timeout)?,
            instantiate(&golden_spec, Some(arity), args.exec_timeout)?,
            seed_input,
            grid.unwrap_or_else(|| spec.default_grid()),
        )
        .map_err(|e| usage(format!("{spec}: validation grid: {e}")))?;
        subjects.push(subject);
    }
    let mut config = ExperimentConfig::new(subjects[0].seed_input.arity());
    config.l_values = args.l_values;
    config.reps = args.reps;
    config.base_seed = args.rng_seed;
    config.record_wall = !args.deterministic;
    config.session.committee_s = args.committee;
    config.session.loop_timeout = Duration::from_secs(args.timeout);
    config.session.mutation.integer_only = args.integer_only;
    if config.l_values.contains(&0) {
        return Err(usage("--l-values must be at least 1"));
    }
    config.session.validate().map_err(usage)?;

    let rows = run_experiment(&subjects, &config);
    let summary = summarize(&rows);
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(failure)?;
            let runs = fs::File::create(dir.join("runs.csv")).map_err(failure)?;
            write_runs_csv(&rows, runs).map_err(failure)?;
            let sum = fs::File::create(dir.join("summary.csv")).map_err(failure)?;
            write_summary_csv(&summary, sum).map_err(failure)?;
            write_summary_csv(&summary, out).map_err(failure)?;
        }
        None => write_runs_csv(&rows, out).map_err(failure)?,
    }
    Ok(())
}

/// Inputs of the grid or suite, each labeled with the golden output.
fn validation_inputs(
    suite: Option<&Path>,
    grid: &str,
    golden: &dyn Subject,
) -> Result<Vec<LabeledTest>, CliError> {
    let inputs: Vec<InputVector> = match suite {
        Some(dir) => import_suite(dir)
            .map_err(usage)?
            .1
            .into_iter()
            .map(|t| t.test.input)
            .collect(),
        None => {
            let (lo, hi) = parse_range(grid).map_err(usage)?;
            bugoracle_core::metrics::grid_inputs(golden.arity(), lo, hi)
        }
    };
    inputs
        .into_iter()
        .map(|input| {
            let output = golden.execute(&input).map_err(failure)?;
            let label = Label::passing().with_expected(output.clone());
            LabeledTest::new(TestCase::new(input, output), label, Source::SimulatedGolden).map_err(failure)
        })
        .collect()
}

fn score(args: ScoreArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let golden_spec = parse_spec(&args.golden)?;
    let patched_spec = parse_spec(&args.patched)?;
    let arity = golden_spec.arity(args.arity).map_err(usage)?;
    let golden = instantiate(&golden_spec, Some(arity), args.exec_timeout)?;
    let patched = instantiate(&patched_spec, Some(arity), args.exec_timeout)?;
    let suite = validation_inputs(args.suite.as_deref(), &args.grid, &*golden)?;
    let value = validation_score(&*patched, &suite, &*golden).map_err(failure)?;
    writeln!(out, "{:?}", to_f64(&value)).map_err(failure)
}

fn eval_oracle(args: EvalOracleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (suite, arity) = match (&args.suite, &args.subject) {
        (Some(dir), _) => {
            let (manifest, suite) = import_suite(dir).map_err(usage)?;
            (suite, manifest.arity)
        }
        (None, Some(subject)) => {
            let spec = parse_spec(subject)?;
            let golden_spec = parse_spec(args.golden.as_deref().expect("clap requires --golden"))?;
            let arity = spec.arity(args.arity).map_err(usage)?;
            let grid = match &args.grid {
                Some(g) => parse_range(g).map_err(usage)?,
                None => spec.default_grid(),
            };
            let buggy = instantiate(&spec, Some(arity), args.exec_timeout)?;
            let golden = instantiate(&golden_spec, Some(arity), args.exec_timeout)?;
            let v = bugoracle_core::ValidationSuite::from_grid(&*buggy, &*golden, grid.0, grid.1, &[])
                .map_err(failure)?;
            (v.tests().to_vec(), arity)
        }
        (None, None) => return Err(usage("give --suite or --subject with --golden")),
    };
    let arity = args.arity.unwrap_or(arity);
    let formula = read_formula(&args.oracle, arity).map_err(usage)?;
    let acc = prediction_accuracy(&formula, &suite).map_err(failure)?;
    writeln!(out, "accuracy {:?}", to_f64(&acc)).map_err(failure)?;
    match conditional_accuracy(&formula, &suite) {
        Ok(c) => writeln!(out, "cond_accuracy {:?}", to_f64(&c)).map_err(failure),
        Err(_) => writeln!(out, "cond_accuracy n/a (no failing tests)").map_err(failure),
    }
}
