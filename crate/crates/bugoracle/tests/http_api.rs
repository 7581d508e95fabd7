use std::sync::{Arc, Mutex};
use std::thread;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use bugoracle::events::EventRecord;
use bugoracle::interactive::{lock_status, RunState, SharedStatus};
use bugoracle::server::{router, AppState, QueryView, SessionView};
use bugoracle::{InteractiveOracle, LabelChannel, SessionStatus, StatusObserver};
use bugoracle_core::number::{format_number, parse_numbers};
use bugoracle_core::subject::run_subject;
use bugoracle_core::{
    ActiveLoop, Builtin, HumanOracle, InputVector, Query, SessionConfig,
    SimulatedHumanOracle, Subject, TestCase,
};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn config(l: usize, seed: u64) -> SessionConfig {
    let mut c = SessionConfig::new(3);
    c.budget_l = l;
    c.rng_seed = seed;
    c
}

fn app(config: &SessionConfig) -> (Router, Arc<LabelChannel>, SharedStatus) {
    let channel = LabelChannel::new();
    let status = Arc::new(Mutex::new(SessionStatus::new(config, "builtin:triangle-steve")));
    let state = AppState {
        channel: channel.clone(),
        status: status.clone(),
    };
    (router(state, None), channel, status)
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<String>) -> (StatusCode, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req.body(body.map(Body::from).unwrap_or_else(Body::empty)).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes)
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Vec<u8>) {
    call(app, Method::GET, uri, None).await
}

async fn post_label(app: &Router, body: Value) -> (StatusCode, Value) {
    let (status, bytes) = call(app, Method::POST, "/api/label", Some(body.to_string())).await;
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

fn triangle_test(input: &[i64]) -> TestCase {
    run_subject(&Builtin::TriangleSteve, &InputVector::from_ints(input).unwrap()).unwrap()
}

type Answer = Result<bugoracle_core::Label, bugoracle_core::HumanError>;

/// Asks `query` on a worker thread as the session would.
fn pend(channel: &Arc<LabelChannel>, query: Query) -> thread::JoinHandle<Answer> {
    let channel = channel.clone();
    thread::spawn(move || InteractiveOracle::new(channel, None).label(&query))
}

fn wait_pending(channel: &LabelChannel, id: u64) {
    let p = channel
        .wait_for_query(std::time::Duration::from_secs(10))
        .expect("query is pended");
    assert_eq!(p.id, id);
}

#[tokio::test]
async fn no_pending_query_is_204() {
    let (app, _, _) = app(&config(10, 0));
    let (status, body) = get(&app, "/api/query").await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    assert!(body.is_empty());
}

#[tokio::test]
async fn session_view_reports_configuration_and_progress() {
    let (app, _, status) = app(&config(10, 3));
    {
        let mut s = lock_status(&status);
        s.suite_len = 4;
        s.labeled_failing = 2;
        s.oracle = "(= o 2)".into();
    }
    let (code, body) = get(&app, "/api/session").await;
    assert_eq!(code, StatusCode::OK);
    let view: SessionView = serde_json::from_slice(&body).unwrap();
    assert_eq!(view.subject, "builtin:triangle-steve");
    assert_eq!(view.arity, 3);
    assert_eq!(view.budget, 10);
    assert_eq!(view.committee, 10);
    assert_eq!(view.rng_seed, 3);
    assert_eq!(view.labeled, 4);
    assert_eq!(view.labeled_failing, 2);
    assert_eq!(view.progress, "4/10");
    assert_eq!(view.oracle, "(= o 2)");
    assert_eq!(view.state, "running");
    assert_eq!(view.pending_query, None);
}

#[tokio::test]
async fn label_flow_accepts_once_and_rejects_stale_and_duplicates() {
    let (app, channel, _) = app(&config(10, 0));
    let test = triangle_test(&[3, 3, 3]);
    let worker = pend(&channel, Query { id: 7, test: test.clone() });
    wait_pending(&channel, 7);

    let (code, first) = get(&app, "/api/query").await;
    assert_eq!(code, StatusCode::OK);
    let (_, second) = get(&app, "/api/query").await;
    assert_eq!(first, second, "GET /api/query is idempotent");
    let view: QueryView = serde_json::from_slice(&first).unwrap();
    assert_eq!(view.query_id, 7);
    assert_eq!(view.input, vec!["3", "3", "3"]);
    assert_eq!(view.output, format_number(&test.output));

    let (_, session) = get(&app, "/api/session").await;
    let session: SessionView = serde_json::from_slice(&session).unwrap();
    assert_eq!(session.pending_query, Some(7));

    let (code, _) = post_label(&app, json!({"query_id": 99, "verdict": "fail"})).await;
    assert_eq!(code, StatusCode::CONFLICT, "unknown id is stale");

    let (code, body) = post_label(&app, json!({"query_id": 7, "verdict": "fail", "expected_output": "1"})).await;
    assert_eq!(code, StatusCode::OK);
    assert_eq!(body, json!({"accepted": 7}));
    let label = worker.join().unwrap().unwrap();
    assert!(label.verdict.is_failing());
    assert_eq!(label.expected_output, Some(bugoracle_core::number::int(1)));

    let (code, body) = post_label(&app, json!({"query_id": 7, "verdict": "pass"})).await;
    assert_eq!(code, StatusCode::CONFLICT, "duplicate answer");
    assert!(body["error"].as_str().unwrap().contains("already answered"));
    assert_eq!(get(&app, "/api/query").await.0, StatusCode::NO_CONTENT);
}

#[tokio::test]
async fn malformed_or_inconsistent_labels_are_400() {
    let (app, channel, _) = app(&config(10, 0));
    let test = triangle_test(&[3, 3, 3]);
    let output = format_number(&test.output);
    let worker = pend(&channel, Query { id: 1, test });
    wait_pending(&channel, 1);

    let (code, _) = call(&app, Method::POST, "/api/label", Some("not json".into())).await;
    assert_eq!(code, StatusCode::BAD_REQUEST);
    for body in [
        json!({"verdict": "fail"}),
        json!({"query_id": 1, "verdict": "maybe"}),
        json!({"query_id": 1, "verdict": "fail", "expected_output": "abc"}),
        json!({"query_id": 1, "verdict": "fail", "expected_output": [1]}),
        json!({"query_id": 1, "verdict": "fail", "extra": true}),
        // A bug whose expected output equals the actual one is contradictory.
        json!({"query_id": 1, "verdict": "fail", "expected_output": output}),
        json!({"query_id": 1, "verdict": "pass", "expected_output": 12345}),
    ] {
        let (code, resp) = post_label(&app, body.clone()).await;
        assert_eq!(code, StatusCode::BAD_REQUEST, "{body}");
        assert!(resp["error"].is_string());
    }
    assert_eq!(channel.pending().map(|p| p.id), Some(1), "bad answers leave the query pending");

    let (code, _) = post_label(&app, json!({"query_id": 1, "verdict": "pass", "expected_output": 2})).await;
    assert_eq!(code, StatusCode::OK, "numeric expected output");
    assert!(!worker.join().unwrap().unwrap().verdict.is_failing());
}

#[tokio::test]
async fn console_page_and_cors() {
    let (app, _, _) = app(&config(10, 0));
    let (code, body) = get(&app, "/").await;
    assert_eq!(code, StatusCode::OK);
    assert!(String::from_utf8(body).unwrap().contains("/api/query"));

    let req = Request::builder()
        .uri("/api/session")
        .header("origin", "http://localhost:5173")
        .body(Body::empty())
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    assert!(resp.headers().contains_key("access-control-allow-origin"));
}

#[tokio::test]
async fn static_dir_replaces_the_built_in_page() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "custom console").unwrap();
    let config = config(10, 0);
    let state = AppState {
        channel: LabelChannel::new(),
        status: Arc::new(Mutex::new(SessionStatus::new(&config, "s"))),
    };
    let app = router(state, Some(dir.path().to_path_buf()));
    let (code, body) = get(&app, "/").await;
    assert_eq!(code, StatusCode::OK);
    assert_eq!(body, b"custom console");
    assert_eq!(get(&app, "/api/query").await.0, StatusCode::NO_CONTENT);
}

#[test]
fn closing_the_channel_releases_a_waiting_session() {
    let channel = LabelChannel::new();
    let worker = pend(&channel, Query { id: 1, test: triangle_test(&[1, 1, 1]) });
    wait_pending(&channel, 1);
    channel.close();
    assert!(worker.join().unwrap().is_err());
    assert!(channel.pending().is_none());
}

/// Answers every query over HTTP with the golden version's label until the session ends.
async fn scripted_client(app: Router, status: SharedStatus) {
    let golden = Builtin::TriangleGolden;
    loop {
        let (code, body) = get(&app, "/api/query").await;
        if code == StatusCode::OK {
            let q: QueryView = serde_json::from_slice(&body).unwrap();
            let input = InputVector::new(parse_numbers(&q.input.join(" ")).unwrap()).unwrap();
            let expected = golden.execute(&input).unwrap();
            let actual = parse_numbers(&q.output).unwrap().remove(0);
            let verdict = if expected == actual { "pass" } else { "fail" };
            let body = json!({"query_id": q.query_id, "verdict": verdict, "expected_output": format_number(&expected)});
            let (code, _) = post_label(&app, body).await;
            assert_eq!(code, StatusCode::OK);
        } else if lock_status(&status).state != RunState::Running {
            return;
        } else {
            tokio::time::sleep(std::time::Duration::from_millis(1)).await;
        }
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn scripted_http_client_matches_simulated_mode() {
    let config = config(8, 11);
    let seed = InputVector::from_ints(&[2, 2, 2]).unwrap();

    let mut simulated = SimulatedHumanOracle::new(Builtin::TriangleGolden);
    let expected = ActiveLoop::new(&config, &Builtin::TriangleSteve)
        .run(seed.clone(), &mut simulated)
        .unwrap();

    let (app, channel, status) = app(&config);
    let session = {
        let (channel, status, config, seed) = (channel.clone(), status.clone(), config.clone(), seed.clone());
        thread::spawn(move || {
            let mut observer = StatusObserver(status.clone());
            let mut human = InteractiveOracle::new(channel, None);
            let result = ActiveLoop::new(&config, &Builtin::TriangleSteve)
                .observer(&mut observer)
                .run(seed, &mut human);
            lock_status(&status).state = RunState::Complete;
            result
        })
    };
    scripted_client(app.clone(), status.clone()).await;
    let actual = session.join().unwrap().unwrap();

    let strip = |suite: &[bugoracle_core::LabeledTest]| {
        suite.iter().map(|t| (t.test.clone(), t.label.clone())).collect::<Vec<_>>()
    };
    assert_eq!(strip(&actual.suite), strip(&expected.suite));
    assert_eq!(actual.oracle.formula(), expected.oracle.formula());
    assert_eq!(actual.counts, expected.counts);
    assert_eq!(actual.events, expected.events);
    assert_eq!(simulated.queries(), actual.counts.queries);

    let (_, body) = get(&app, "/api/events").await;
    let events: Vec<EventRecord> = serde_json::from_slice(&body).unwrap();
    let want: Vec<EventRecord> = expected.events.iter().map(EventRecord::from).collect();
    assert_eq!(events, want);
    let (_, body) = get(&app, "/api/session").await;
    let view: SessionView = serde_json::from_slice(&body).unwrap();
    assert_eq!(view.labeled, expected.suite.len());
    assert_eq!(view.state, "complete");
    drop(channel);
}
