//! HTTP API for interactive labeling.
//!
//! | route             | response                                              |
//! |-------------------|-------------------------------------------------------|
//! | `GET /api/session`| configuration, progress and the current oracle        |
//! | `GET /api/query`  | the pending query, or 204 when none                   |
//! | `POST /api/label` | `{query_id, verdict, expected_output?}`; 409 if stale |
//! | `GET /api/events` | the event log so far                                  |
//! | `GET /`           | the labeling console                                  |

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use bugoracle_core::number::{format_number, parse_number};
use bugoracle_core::{Label, Verdict};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

use crate::events::{input_strings, EventRecord};
use crate::interactive::{lock_status, LabelChannel, SharedStatus, SubmitError};

const PLACEHOLDER: &str = include_str!("../static/index.html");

#[derive(Clone)]
pub struct AppState {
    pub channel: Arc<LabelChannel>,
    pub status: SharedStatus,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SessionView {
    pub subject: String,
    pub arity: usize,
    pub budget: usize,
    pub committee: usize,
    pub rng_seed: u64,
    /// Labeled suite size `|T|`, seed included.
    pub labeled: usize,
    pub labeled_failing: usize,
    pub generated: usize,
    pub progress: String,
    pub oracle: String,
    pub provenance: String,
    pub state: String,
    pub termination: Option<String>,
    pub error: Option<String>,
    pub pending_query: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct QueryView {
    pub query_id: u64,
    pub input: Vec<String>,
    pub output: String,
    pub issued_at_ms: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelBody {
    query_id: u64,
    verdict: String,
    #[serde(default)]
    expected_output: Option<Value>,
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(ErrorBody { error: message.into() })).into_response()
}

/// The API plus the console: files from `static_dir` when given, else a built-in page.
pub fn router(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/session", get(session))
        .route("/api/query", get(query))
        .route("/api/label", post(label))
        .route("/api/events", get(events))
        .with_state(state);
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(PLACEHOLDER) })),
    };
    app.layer(CorsLayer::permissive())
}

async fn session(State(state): State<AppState>) -> Json<SessionView> {
    let pending_query = state.channel.pending().map(|p| p.id);
    let s = lock_status(&state.status);
    Json(SessionView {
        subject: s.subject.clone(),
        arity: s.arity,
        budget: s.budget_l,
        committee: s.committee_s,
        rng_seed: s.rng_seed,
        labeled: s.suite_len,
        labeled_failing: s.labeled_failing,
        generated: s.generated,
        progress: format!("{}/{}", s.suite_len, s.budget_l),
        oracle: s.oracle.clone(),
        provenance: s.provenance.clone(),
        state: s.state.as_str().to_string(),
        termination: s.termination.clone(),
        error: s.error.clone(),
        pending_query,
    })
}

async fn query(State(state): State<AppState>) -> Response {
    match state.channel.pending() {
        Some(p) => Json(QueryView {
            query_id: p.id,
            input: input_strings(&p.test),
            output: format_number(&p.test.output),
            issued_at_ms: p.issued_at_ms as u64,
        })
        .into_response(),
        None => StatusCode::NO_CONTENT.into_response(),
    }
}

fn parse_label(body: &[u8]) -> Result<(u64, Label), String> {
    let body: LabelBody = serde_json::from_slice(body).map_err(|e| e.to_string())?;
    let verdict = match body.verdict.as_str() {
        "pass" => Verdict::Passing,
        "fail" => Verdict::Failing,
        other => return Err(format!("verdict must be \"pass\" or \"fail\", got {other:?}")),
    };
    let expected_output = match body.expected_output {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(parse_number(&s).map_err(|e| e.to_string())?),
        Some(Value::Number(n)) => Some(parse_number(&n.to_string()).map_err(|e| e.to_string())?),
        Some(other) => return Err(format!("expected_output must be a number, got {other}")),
    };
    Ok((
        body.query_id,
        Label {
            verdict,
            expected_output,
        },
    ))
}

async fn label(State(state): State<AppState>, body: Bytes) -> Response {
    let (id, label) = match parse_label(&body) {
        Ok(parsed) => parsed,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    match state.channel.submit(id, label) {
        Ok(()) => Json(serde_json::json!({ "accepted": id })).into_response(),
        Err(e @ (SubmitError::Stale(_) | SubmitError::Duplicate(_))) => error(StatusCode::CONFLICT, e.to_string()),
        Err(e @ SubmitError::Invalid(_)) => error(StatusCode::BAD_REQUEST, e.to_string()),
    }
}

async fn events(State(state): State<AppState>) -> Json<Vec<EventRecord>> {
    Json(lock_status(&state.status).events.clone())
}
