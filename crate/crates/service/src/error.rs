use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use coomforge_core::interactive::InteractiveError;
use serde::Serialize;
use serde_json::Value as JsonValue;

/// Error response body: `{code, message, diagnostics?}`.
#[derive(Debug, Clone, Serialize, thiserror::Error)]
#[error("{code}: {message}")]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Vec<JsonValue>>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            diagnostics: None,
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "malformed_request", message)
    }

    pub fn invalid_model(message: impl Into<String>, diagnostics: Vec<JsonValue>) -> Self {
        ApiError {
            diagnostics: Some(diagnostics),
            ..Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_model", message)
        }
    }

    pub fn no_session(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown_session", format!("no session `{id}`"))
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<InteractiveError> for ApiError {
    fn from(e: InteractiveError) -> Self {
        let message = e.to_string();
        let (status, code) = match e {
            InteractiveError::UnknownTarget(_) => (StatusCode::CONFLICT, "unknown_target"),
            InteractiveError::NotAnAttribute(_) => (StatusCode::CONFLICT, "not_an_attribute"),
            InteractiveError::NotAPart(_) => (StatusCode::CONFLICT, "not_a_part"),
            InteractiveError::ValueOutOfDomain { .. } => (StatusCode::CONFLICT, "value_out_of_domain"),
            InteractiveError::Unsatisfiable => (StatusCode::CONFLICT, "unsatisfiable"),
            InteractiveError::Satisfiable => (StatusCode::CONFLICT, "satisfiable"),
            InteractiveError::Exhausted => (StatusCode::CONFLICT, "exhausted"),
            InteractiveError::UnknownAssumption(_) => (StatusCode::NOT_FOUND, "unknown_assumption"),
            InteractiveError::Internal(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        Self::new(status, code, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}
