use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use growai_core::campaign::CampaignError;
use growai_core::rubric::ArenaId;
use serde::Serialize;
use serde_json::json;

/// One rejected field of a request. `arena` is set for score fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldError {
    pub field: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arena: Option<ArenaId>,
    pub reason: String,
    pub message: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("unknown campaign `{0}`")]
    UnknownCampaign(String),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("malformed request body: {0}")]
    MalformedRequest(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("evaluator id missing (send `evaluator_id` or the x-evaluator-id header)")]
    MissingEvaluator,
    #[error("session belongs to another evaluator")]
    EvaluatorMismatch,
    #[error("campaign `{0}` already exists")]
    CampaignExists(String),
    #[error("session is already submitted")]
    SessionSubmitted,
    #[error("revision is {current}, request expected {expected}")]
    RevisionMismatch { expected: u64, current: u64 },
    #[error("sheet incomplete")]
    IncompleteSheet { missing: Vec<ArenaId> },
    #[error(transparent)]
    Campaign(#[from] CampaignError),
    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        use CampaignError as C;
        match self {
            ApiError::UnknownCampaign(_) | ApiError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ApiError::MalformedRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::InvalidRequest(_) | ApiError::MissingEvaluator | ApiError::IncompleteSheet { .. } => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            ApiError::EvaluatorMismatch => StatusCode::FORBIDDEN,
            ApiError::CampaignExists(_) | ApiError::SessionSubmitted | ApiError::RevisionMismatch { .. } => {
                StatusCode::CONFLICT
            }
            ApiError::Campaign(e) => match e {
                C::CampaignFinalized
                | C::NotFinalized
                | C::DuplicateEvaluator(_)
                | C::DuplicateRun(_)
                | C::InsufficientRuns { .. } => StatusCode::CONFLICT,
                C::EntityMismatch { .. } | C::InvalidId(_) | C::OutOfRange(_) => StatusCode::UNPROCESSABLE_ENTITY,
                C::Io { .. } | C::Json { .. } => StatusCode::INTERNAL_SERVER_ERROR,
            },
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn code(&self) -> &'static str {
        use CampaignError as C;
        match self {
            ApiError::UnknownCampaign(_) => "UnknownCampaign",
            ApiError::UnknownSession(_) => "UnknownSession",
            ApiError::MalformedRequest(_) => "MalformedRequest",
            ApiError::InvalidRequest(_) => "InvalidRequest",
            ApiError::MissingEvaluator => "MissingEvaluator",
            ApiError::EvaluatorMismatch => "EvaluatorMismatch",
            ApiError::CampaignExists(_) => "CampaignExists",
            ApiError::SessionSubmitted => "SessionSubmitted",
            ApiError::RevisionMismatch { .. } => "RevisionMismatch",
            ApiError::IncompleteSheet { .. } => "IncompleteSheet",
            ApiError::Campaign(e) => match e {
                C::CampaignFinalized => "CampaignFinalized",
                C::NotFinalized => "NotFinalized",
                C::DuplicateEvaluator(_) => "DuplicateEvaluator",
                C::DuplicateRun(_) => "DuplicateRun",
                C::EntityMismatch { .. } => "EntityMismatch",
                C::InsufficientRuns { .. } => "InsufficientRuns",
                C::OutOfRange(_) => "OutOfRange",
                C::InvalidId(_) => "InvalidId",
                C::Io { .. } | C::Json { .. } => "StorageError",
            },
            ApiError::Internal(_) => "Internal",
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = self.status();
        if status.is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        let mut body = json!({ "error": self.code(), "message": self.to_string() });
        match &self {
            ApiError::IncompleteSheet { missing } => body["missing"] = json!(missing),
            ApiError::RevisionMismatch { current, .. } => body["revision"] = json!(current),
            _ => {}
        }
        (status, Json(body)).into_response()
    }
}
