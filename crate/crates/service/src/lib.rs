//! REST session service over the interactive engine. Every request on a
//! session runs under that session's lock on the blocking pool; distinct
//! sessions proceed in parallel.

mod error;
mod store;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use coomforge_core::interactive::{Direction, InteractiveError, SessionState, SessionView};
use coomforge_core::space::load_explanations;
use coomforge_core::{instantiate, parse_model, parse_user_input, validate_ast, Model, Value};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as JsonValue};

pub use error::ApiError;
pub use store::{SessionRecord, SessionStore};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub idle_timeout: Duration,
    /// Instances created for each `*` feature.
    pub max_bound: u32,
    /// Directory of static UI assets served for paths outside the API.
    pub static_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            idle_timeout: Duration::from_secs(30 * 60),
            max_bound: 4,
            static_dir: None,
        }
    }
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<SessionStore>,
    config: Arc<ServiceConfig>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState {
            store: Arc::new(SessionStore::new(config.idle_timeout)),
            config: Arc::new(config),
        }
    }
}

pub fn router(app: AppState) -> Router {
    let static_dir = app.config.static_dir.clone();
    let api = Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", delete(delete_session))
        .route("/sessions/{id}/view", get(get_view))
        .route("/sessions/{id}/assumptions", post(post_assumption))
        .route("/sessions/{id}/assumptions/{n}", delete(retract_assumption))
        .route("/sessions/{id}/browse", post(browse))
        .route("/sessions/{id}/solution", get(download_solution))
        .with_state(app);
    match static_dir {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until the listener fails, evicting idle sessions in the
/// background.
pub async fn serve(listener: tokio::net::TcpListener, config: ServiceConfig) -> std::io::Result<()> {
    let app = AppState::new(config);
    let store = app.store.clone();
    let period = (store.idle_timeout() / 4).clamp(Duration::from_millis(10), Duration::from_secs(60));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            let n = store.evict_idle();
            if n > 0 {
                tracing::info!(evicted = n, "idle sessions dropped");
            }
        }
    });
    axum::serve(listener, router(app)).await
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("request body: {e}")))
}

fn to_json<T: Serialize>(v: &T) -> Result<JsonValue, ApiError> {
    serde_json::to_value(v).map_err(|e| ApiError::internal(e.to_string()))
}

/// Runs `f` on the session's state under its lock, off the async workers.
async fn with_session<T, F>(app: &AppState, id: &str, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&mut SessionState) -> Result<T, ApiError> + Send + 'static,
{
    let rec = app.store.touch(id).ok_or_else(|| ApiError::no_session(id))?;
    tokio::task::spawn_blocking(move || f(&mut rec.state.lock()))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

fn view_json(state: &mut SessionState) -> Result<JsonValue, ApiError> {
    to_json::<SessionView>(state.view())
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CreateRequest {
    model: String,
    user_input: Option<String>,
    /// The sidecar as a JSON object or as its text.
    explanations: Option<JsonValue>,
    max_bound: Option<u32>,
}

fn build_session(req: CreateRequest, default_bound: u32) -> Result<SessionState, ApiError> {
    let ast = parse_model(&req.model).map_err(|errs| {
        let diags = errs.0.iter().filter_map(|e| serde_json::to_value(e).ok()).collect();
        ApiError::invalid_model("the model does not parse", diags)
    })?;
    let semantic = validate_ast(&ast);
    if !semantic.is_empty() {
        let diags = semantic.iter().filter_map(|e| serde_json::to_value(e).ok()).collect();
        return Err(ApiError::invalid_model("the model is not valid", diags));
    }
    let space = instantiate(&ast, req.max_bound.unwrap_or(default_bound))
        .map_err(|e| ApiError::invalid_model(e.to_string(), vec![json!({ "message": e.to_string() })]))?;
    let explanations = match req.explanations {
        None | Some(JsonValue::Null) => Default::default(),
        Some(sidecar) => {
            let text = match sidecar {
                JsonValue::String(s) => s,
                other => other.to_string(),
            };
            let (map, ignored) = load_explanations(&space, &text)
                .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_explanations", e.to_string()))?;
            for w in ignored {
                tracing::warn!("{w}");
            }
            map
        }
    };
    let space = Arc::new(space);
    match req.user_input {
        None => Ok(SessionState::new(space, explanations)),
        Some(text) => {
            let input = parse_user_input(&text).map_err(|errs| {
                let diags = errs.0.iter().filter_map(|e| serde_json::to_value(e).ok()).collect();
                ApiError {
                    code: "invalid_user_input",
                    ..ApiError::invalid_model("the user input does not parse", diags)
                }
            })?;
            Ok(SessionState::with_user_input(space, explanations, &input))
        }
    }
}

async fn create_session(State(app): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateRequest = parse_body(&body)?;
    let bound = app.config.max_bound;
    let mut state = tokio::task::spawn_blocking(move || {
        let mut s = build_session(req, bound)?;
        s.view();
        Ok::<_, ApiError>(s)
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    let view = view_json(&mut state)?;
    let rec = app.store.insert(state);
    Ok((StatusCode::CREATED, Json(json!({ "sessionId": rec.id, "view": view }))).into_response())
}

async fn delete_session(State(app): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    if app.store.remove(&id) {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::no_session(&id))
    }
}

async fn get_view(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<JsonValue>, ApiError> {
    with_session(&app, &id, view_json).await.map(Json)
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum Action {
    Fix,
    Unfix,
    Include,
    Exclude,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AssumptionRequest {
    action: Action,
    target: String,
    value: Option<Value>,
}

async fn post_assumption(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<JsonValue>, ApiError> {
    let req: AssumptionRequest = parse_body(&body)?;
    if matches!(req.action, Action::Fix) && req.value.is_none() {
        return Err(ApiError::bad_request("`fix` needs a value"));
    }
    with_session(&app, &id, move |s| {
        match req.action {
            Action::Fix => s.fix(&req.target, req.value.expect("checked above")).map(drop)?,
            Action::Unfix => s.unfix(&req.target).map(drop)?,
            Action::Include => s.set_included(&req.target, true).map(drop)?,
            Action::Exclude => s.set_included(&req.target, false).map(drop)?,
        }
        view_json(s)
    })
    .await
    .map(Json)
}

async fn retract_assumption(
    State(app): State<AppState>,
    Path((id, n)): Path<(String, String)>,
) -> Result<Json<JsonValue>, ApiError> {
    let n: u64 = n
        .parse()
        .map_err(|_| ApiError::bad_request(format!("`{n}` is not an assumption id")))?;
    with_session(&app, &id, move |s| {
        s.retract(n)?;
        view_json(s)
    })
    .await
    .map(Json)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BrowseRequest {
    direction: Direction,
}

/// What the client shows for a browsed model.
#[derive(Serialize)]
struct ModelSummary {
    included: Vec<String>,
    values: BTreeMap<String, Value>,
    solution: String,
}

fn summarize(s: &SessionState, m: &Model) -> Result<ModelSummary, ApiError> {
    let space = s.space();
    let mut included = Vec::new();
    let mut values = BTreeMap::new();
    for (i, var) in space.variables.iter().enumerate() {
        if !m.included[i] {
            continue;
        }
        match &m.values[i] {
            Some(v) => {
                values.insert(var.id.clone(), v.clone());
            }
            None => included.push(var.id.clone()),
        }
    }
    let solution = coomforge_core::space::solution_to_coom(space, m)
        .map_err(|f| ApiError::internal(format!("browsed model fails its check: {f:?}")))?;
    Ok(ModelSummary {
        included,
        values,
        solution,
    })
}

async fn browse(State(app): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Json<JsonValue>, ApiError> {
    let req: BrowseRequest = parse_body(&body)?;
    with_session(&app, &id, move |s| {
        let (model, exhausted) = match s.browse(req.direction) {
            Ok(m) => (Some(summarize(s, &m)?), false),
            Err(InteractiveError::Exhausted) => (None, true),
            Err(e) => return Err(e.into()),
        };
        Ok(json!({ "view": view_json(s)?, "model": to_json(&model)?, "exhausted": exhausted }))
    })
    .await
    .map(Json)
}

async fn download_solution(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let text = with_session(&app, &id, |s| Ok(s.solution_text()?)).await?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}
