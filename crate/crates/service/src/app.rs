//! HTTP protocol, version 1. Every JSON body carries `protocol`; errors
//! are `{"protocol": 1, "error": {"code", "message"}}`.
//!
//! | method | path                        | body                          |
//! |--------|-----------------------------|-------------------------------|
//! | GET    | /v1/health                  |                               |
//! | POST   | /v1/sessions                | `{scenario, seed?, channel?}` |
//! | POST   | /v1/sessions/{id}/turns     | `{text, channel?}`            |
//! | GET    | /v1/sessions/{id}/turns     |                               |
//! | GET    | /v1/sessions/{id}/state     |                               |
//! | GET    | /v1/sessions/{id}/report    |                               |
//! | GET    | /v1/sessions/{id}/events    | server-sent `display` events  |

use std::collections::{BTreeMap, HashMap};
use std::convert::Infallible;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::broadcast;
use tokio_stream::wrappers::BroadcastStream;
use tokio_stream::{Stream, StreamExt};
use trains_core::corpus::Channel;
use trains_core::generator::DisplayCommand;
use trains_core::session::{Resources, Session};
use trains_core::solver::Scenario;

use crate::Loaded;

pub const PROTOCOL_VERSION: u32 = 1;

struct Slot {
    /// Turns of one session run one at a time under this lock.
    session: Mutex<Session>,
    channel: Channel,
    events: broadcast::Sender<Sequenced>,
    sent: AtomicU64,
}

#[derive(Debug, Clone, Serialize)]
struct Sequenced {
    seq: u64,
    command: DisplayCommand,
}

#[derive(Clone)]
pub struct AppState {
    resources: Resources,
    scenarios: Arc<BTreeMap<String, Scenario>>,
    sessions: Arc<RwLock<HashMap<String, Arc<Slot>>>>,
    next_id: Arc<AtomicU64>,
    event_buffer: usize,
}

impl AppState {
    pub fn new(loaded: Loaded, event_buffer: usize) -> Self {
        AppState {
            resources: loaded.resources,
            scenarios: Arc::new(loaded.scenarios),
            sessions: Arc::default(),
            next_id: Arc::new(AtomicU64::new(1)),
            event_buffer: event_buffer.max(1),
        }
    }

    fn slot(&self, id: &str) -> Result<Arc<Slot>, ApiError> {
        self.sessions
            .read()
            .expect("session table lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown-session", format!("no session {id:?}")))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{id}/turns", post(turn).get(turn_log))
        .route("/v1/sessions/{id}/state", get(session_state))
        .route("/v1/sessions/{id}/report", get(report))
        .route("/v1/sessions/{id}/events", get(events))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "no-route", "no such endpoint") })
        .with_state(state)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad-request", r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({
            "protocol": PROTOCOL_VERSION,
            "error": { "code": self.code, "message": self.message },
        });
        (self.status, Json(body)).into_response()
    }
}

fn ok(mut body: Value) -> Json<Value> {
    body["protocol"] = json!(PROTOCOL_VERSION);
    Json(body)
}

async fn health(State(app): State<AppState>) -> Json<Value> {
    ok(json!({ "scenarios": app.scenarios.keys().collect::<Vec<_>>() }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    scenario: String,
    #[serde(default)]
    seed: u64,
    #[serde(default = "keyboard")]
    channel: Channel,
}

fn keyboard() -> Channel {
    Channel::Keyboard
}

async fn create_session(
    State(app): State<AppState>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    let Json(req) = body?;
    let scenario = app.scenarios.get(&req.scenario).cloned().ok_or_else(|| {
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "unknown-scenario",
            format!("no scenario {:?}", req.scenario),
        )
    })?;
    let id = format!("s{}", app.next_id.fetch_add(1, Ordering::Relaxed));
    let session = Session::new(id.clone(), scenario, req.seed, app.resources.clone())
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid-scenario", e.to_string()))?;
    let body = json!({
        "session_id": id,
        "channel": req.channel,
        "state": session.state(),
        "commands": session.initial_commands(),
    });
    let (events, _) = broadcast::channel(app.event_buffer);
    let slot = Arc::new(Slot {
        session: Mutex::new(session),
        channel: req.channel,
        events,
        sent: AtomicU64::new(0),
    });
    app.sessions.write().expect("session table lock").insert(id, slot);
    Ok((StatusCode::CREATED, ok(body)))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TurnRequest {
    text: String,
    channel: Option<Channel>,
}

async fn turn(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<TurnRequest>, JsonRejection>,
) -> Result<Json<Value>, ApiError> {
    let slot = app.slot(&id)?;
    let Json(req) = body?;
    let channel = req.channel.unwrap_or(slot.channel);
    let done = tokio::task::spawn_blocking(move || {
        let mut session = slot.session.lock().unwrap_or_else(|p| p.into_inner());
        let out = session.turn(&req.text, channel);
        let record = session.turn_log().last().expect("turn was logged");
        let body = json!({
            "turn": record.index,
            "response_text": out.response_text,
            "corrected_text": record.corrected_text,
            "display_commands": out.display_commands,
            "snapshot_hash": record.snapshot_hash,
            "complete": session.is_complete(),
        });
        // published under the session lock so streams see turns in order
        for command in out.display_commands {
            let seq = slot.sent.fetch_add(1, Ordering::Relaxed);
            let _ = slot.events.send(Sequenced { seq, command });
        }
        body
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?;
    Ok(ok(done))
}

async fn turn_log(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let slot = app.slot(&id)?;
    let session = slot.session.lock().unwrap_or_else(|p| p.into_inner());
    Ok(ok(json!({ "turns": session.turn_log() })))
}

async fn session_state(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let slot = app.slot(&id)?;
    let session = slot.session.lock().unwrap_or_else(|p| p.into_inner());
    Ok(ok(json!({ "state": session.state() })))
}

async fn report(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let slot = app.slot(&id)?;
    let session = slot.session.lock().unwrap_or_else(|p| p.into_inner());
    Ok(ok(json!({ "report": session.report(&[]) })))
}

async fn events(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> Result<Sse<impl Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let slot = app.slot(&id)?;
    let stream = BroadcastStream::new(slot.events.subscribe()).filter_map(|item| match item {
        Ok(s) => Some(Ok(Event::default()
            .event("display")
            .id(s.seq.to_string())
            .json_data(&s.command)
            .expect("display commands serialize"))),
        Err(e) => {
            log::warn!("event stream subscriber fell behind: {e}");
            None
        }
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}

/// Binds and serves until interrupted.
pub async fn serve(config: &crate::Config) -> Result<(), crate::ServiceError> {
    let loaded = Loaded::from_config(config)?;
    let state = AppState::new(loaded, config.event_buffer);
    let listener = tokio::net::TcpListener::bind(&config.bind)
        .await
        .map_err(|source| crate::ServiceError::Bind {
            addr: config.bind.clone(),
            source,
        })?;
    log::info!("listening on {}", config.bind);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|source| crate::ServiceError::Bind {
            addr: config.bind.clone(),
            source,
        })
}
