//! JSON-over-HTTP sessions for interactive editing of multi-degree spline
//! curves.
//!
//! | method | path | body / query |
//! |---|---|---|
//! | POST | `/session` | space document |
//! | GET | `/session/{id}` | |
//! | GET | `/session/{id}/samples` | `what=curve\|basis\|transitions\|derivative:R`, `n=N` |
//! | POST | `/session/{id}/op` | `{"op": ..., "expected_version": v, ...}` |
//! | POST | `/session/{id}/undo` | optional `{"expected_version": v}` |

pub mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use mdspline::sample::{sample, Quantity};
use mdspline::{ErrorKind, SpaceDocument};
use serde::Deserialize;
use serde_json::{json, Value};
use tower_http::cors::{AllowOrigin, CorsLayer};
use uuid::Uuid;

pub use session::{Op, Refusal, Session, Snapshot, UNDO_DEPTH};

const DEFAULT_SAMPLES: usize = 200;
const MAX_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy)]
pub struct Config {
    /// Check curve invariance on every insertion and elevation.
    pub verify_invariance: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self { verify_invariance: cfg!(debug_assertions) }
    }
}

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<Uuid, Arc<Session>>>>,
    config: Config,
}

impl AppState {
    pub fn new(config: Config) -> Self {
        Self { sessions: Arc::default(), config }
    }

    fn get(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        let unknown = || ApiError::new(StatusCode::NOT_FOUND, format!("unknown session {id}"));
        let id = Uuid::parse_str(id).map_err(|_| unknown())?;
        self.sessions.read().expect("session table").get(&id).cloned().ok_or_else(unknown)
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    current_version: Option<u64>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self { status, message: message.into(), current_version: None }
    }
}

impl From<Refusal> for ApiError {
    fn from(r: Refusal) -> Self {
        match r {
            Refusal::Stale { current } => Self {
                status: StatusCode::CONFLICT,
                message: format!("version mismatch, current version is {current}"),
                current_version: Some(current),
            },
            Refusal::Precondition(m) => Self::new(StatusCode::UNPROCESSABLE_ENTITY, m),
            Refusal::Internal(m) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, m),
        }
    }
}

impl From<mdspline::Error> for ApiError {
    fn from(e: mdspline::Error) -> Self {
        let status = match e.kind() {
            ErrorKind::Validation => StatusCode::BAD_REQUEST,
            ErrorKind::Precondition => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorKind::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if let Some(v) = self.current_version {
            body["version"] = json!(v);
        }
        (self.status, Json(body)).into_response()
    }
}

fn state_json(s: &Snapshot) -> Value {
    let p = s.curve.partitions();
    json!({
        "version": s.version,
        "K": s.curve.len(),
        "partitions": { "s": p.s(), "t": p.t() },
        "control_points": s.control_points(),
        "document": s.document(),
    })
}

fn parse_json(body: &[u8]) -> Result<Value, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(json!({}));
    }
    serde_json::from_slice(body).map_err(|e| {
        ApiError::new(StatusCode::BAD_REQUEST, format!("line {} column {}: {e}", e.line(), e.column()))
    })
}

fn take_version(v: &mut Value) -> Result<Option<u64>, ApiError> {
    match v.as_object_mut().and_then(|o| o.remove("expected_version")) {
        None | Some(Value::Null) => Ok(None),
        Some(n) => n
            .as_u64()
            .map(Some)
            .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "expected_version must be a non-negative integer")),
    }
}

async fn create_session(State(app): State<AppState>, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    let text = std::str::from_utf8(&body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let doc = SpaceDocument::from_json(text)?;
    let session = Session::open(&doc, app.config.verify_invariance)?;
    let id = Uuid::new_v4();
    let mut body = state_json(&session.snapshot());
    body["session_id"] = json!(id.to_string());
    app.sessions.write().expect("session table").insert(id, Arc::new(session));
    Ok((StatusCode::CREATED, Json(body)))
}

async fn show_session(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    Ok(Json(state_json(&app.get(&id)?.snapshot())))
}

#[derive(Debug, Deserialize)]
struct SampleQuery {
    what: Option<String>,
    n: Option<usize>,
}

async fn samples(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<SampleQuery>,
) -> Result<Json<Value>, ApiError> {
    let snap = app.get(&id)?.snapshot();
    let what: Quantity = q
        .what
        .as_deref()
        .unwrap_or("curve")
        .parse()
        .map_err(|e: mdspline::Error| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let n = q.n.unwrap_or(DEFAULT_SAMPLES);
    if !(2..=MAX_SAMPLES).contains(&n) {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, format!("n must lie in 2..={MAX_SAMPLES}")));
    }
    if what == Quantity::Curve && !snap.has_points {
        return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "session has no control points"));
    }
    let table = sample(snap.curve.basis(), Some(&snap.curve), what, n)?;
    let mut body = serde_json::to_value(&table).expect("sample tables serialize");
    body["version"] = json!(snap.version);
    Ok(Json(body))
}

async fn apply_op(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let session = app.get(&id)?;
    let mut value = parse_json(&body)?;
    let expected = take_version(&mut value)?;
    let op: Op = serde_json::from_value(value).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let applied = session.apply(&op, expected).await?;
    let mut body = state_json(&applied.snapshot);
    if let Some(d) = applied.max_deviation {
        body["max_deviation"] = json!(d);
    }
    Ok(Json(body))
}

async fn undo(State(app): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let session = app.get(&id)?;
    let mut value = parse_json(&body)?;
    let expected = take_version(&mut value)?;
    let snapshot = session.undo(expected).await?;
    Ok(Json(state_json(&snapshot)))
}

fn local_origin(origin: &HeaderValue) -> bool {
    let Ok(o) = origin.to_str() else { return false };
    let host = o.strip_prefix("http://").or_else(|| o.strip_prefix("https://")).unwrap_or("");
    let host = host.rsplit_once(':').map_or(host, |(h, port)| {
        if port.chars().all(|c| c.is_ascii_digit()) {
            h
        } else {
            host
        }
    });
    matches!(host, "localhost" | "127.0.0.1" | "[::1]")
}

pub fn router(state: AppState) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(AllowOrigin::predicate(|o, _| local_origin(o)))
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    Router::new()
        .route("/session", post(create_session))
        .route("/session/{id}", get(show_session))
        .route("/session/{id}/samples", get(samples))
        .route("/session/{id}/op", post(apply_op))
        .route("/session/{id}/undo", post(undo))
        .layer(cors)
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, config: Config) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(AppState::new(config))).await
}
