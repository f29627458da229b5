//! JSON/HTTP layer over one `Session`. Mutations hold the lock for their
//! whole duration, so they apply one at a time in arrival order.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::Value;

use crate::io::CliError;
use crate::session::{cc_value, Session, SessionJson};

#[derive(Clone)]
pub struct AppState {
    session: Arc<Mutex<Session>>,
    truncation: Option<usize>,
}

struct ApiError(CliError);

impl From<CliError> for ApiError {
    fn from(e: CliError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self.0.error.as_str() {
            "HistoryConflict" => StatusCode::CONFLICT,
            "UnknownRep" => StatusCode::NOT_FOUND,
            _ => StatusCode::BAD_REQUEST,
        };
        (status, Json(self.0)).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct MutateRequest {
    k: usize,
    /// History length the client last saw; a mismatch is a conflict.
    #[serde(default)]
    history_length: Option<usize>,
}

pub fn router(session: Session, truncation: Option<usize>) -> Router {
    let state = AppState {
        session: Arc::new(Mutex::new(session)),
        truncation,
    };
    Router::new()
        .route("/state", get(get_state))
        .route("/mutate", post(post_mutate))
        .route("/undo", post(post_undo))
        .route("/load", post(post_load))
        .route("/cc", get(get_cc))
        .with_state(state)
}

async fn get_state(State(app): State<AppState>) -> ApiResult {
    Ok(Json(app.session.lock().unwrap().state()))
}

async fn post_mutate(
    State(app): State<AppState>,
    body: Result<Json<MutateRequest>, axum::extract::rejection::JsonRejection>,
) -> ApiResult {
    let Json(req) = body.map_err(|e| CliError::new("Parse", e.body_text()))?;
    let mut s = app.session.lock().unwrap();
    if let Some(len) = req.history_length {
        if len != s.history().len() {
            return Err(CliError::new(
                "HistoryConflict",
                format!(
                    "history has length {}, request was based on {len}",
                    s.history().len()
                ),
            )
            .into());
        }
    }
    s.mutate(req.k)?;
    Ok(Json(s.state()))
}

async fn post_undo(State(app): State<AppState>) -> ApiResult {
    let mut s = app.session.lock().unwrap();
    s.undo()?;
    Ok(Json(s.state()))
}

async fn post_load(
    State(app): State<AppState>,
    body: Result<Json<SessionJson>, axum::extract::rejection::JsonRejection>,
) -> ApiResult {
    let Json(j) = body.map_err(|e| CliError::new("Parse", e.body_text()))?;
    let loaded = Session::load(&j, app.truncation)?;
    let mut s = app.session.lock().unwrap();
    *s = loaded;
    Ok(Json(s.state()))
}

async fn get_cc(
    State(app): State<AppState>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult {
    let id = q
        .get("rep")
        .ok_or_else(|| CliError::new("Usage", "missing query parameter rep"))?;
    let (qp, rep) = app.session.lock().unwrap().rep(id)?;
    Ok(Json(cc_value(&qp, &rep)?))
}

pub async fn serve(session: Session, port: u16, truncation: Option<usize>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(session, truncation)).await
}
