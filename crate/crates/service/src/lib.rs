//! HTTP+JSON service for live scoring sessions and campaign lifecycle.
//!
//! Campaigns persist under `<data-dir>/<campaign_id>/`; sessions live in
//! memory. Mutations take a per-campaign or per-session lock, so two
//! campaigns never contend. All arithmetic is done by `growai-core`.

mod error;
mod session;

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex as StdMutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use growai_core::campaign::{check_id, Campaign, CampaignDir, CampaignStatus, CampaignSummary, EntityKind};
use growai_core::rubric::{RubricDocument, WeightSet};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;

pub use error::{ApiError, FieldError};
pub use session::{LiveArena, LiveCriterion, LiveSummary, ScoreUpdate, Session, SessionState};

pub const EVALUATOR_HEADER: &str = "x-evaluator-id";

struct CampaignSlot {
    dir: CampaignDir,
    /// evaluator id -> session id
    sessions: Mutex<BTreeMap<String, String>>,
}

struct Inner {
    data_dir: PathBuf,
    campaigns: StdMutex<HashMap<String, Arc<CampaignSlot>>>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn new(data_dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let data_dir = data_dir.into();
        std::fs::create_dir_all(&data_dir)?;
        Ok(AppState(Arc::new(Inner {
            data_dir,
            campaigns: StdMutex::new(HashMap::new()),
            sessions: RwLock::new(HashMap::new()),
        })))
    }

    fn campaign(&self, id: &str) -> Result<Arc<CampaignSlot>, ApiError> {
        if check_id(id).is_err() {
            return Err(ApiError::UnknownCampaign(id.to_string()));
        }
        let mut map = self.0.campaigns.lock().expect("campaign map poisoned");
        if let Some(slot) = map.get(id) {
            return Ok(slot.clone());
        }
        let dir = CampaignDir::new(self.0.data_dir.join(id));
        if !dir.exists() {
            return Err(ApiError::UnknownCampaign(id.to_string()));
        }
        let slot = Arc::new(CampaignSlot {
            dir,
            sessions: Mutex::new(BTreeMap::new()),
        });
        map.insert(id.to_string(), slot.clone());
        Ok(slot)
    }

    fn create_campaign(&self, campaign: &Campaign) -> Result<(), ApiError> {
        let mut map = self.0.campaigns.lock().expect("campaign map poisoned");
        let dir = CampaignDir::new(self.0.data_dir.join(&campaign.campaign_id));
        if map.contains_key(&campaign.campaign_id) || dir.exists() {
            return Err(ApiError::CampaignExists(campaign.campaign_id.clone()));
        }
        dir.init(campaign)?;
        map.insert(
            campaign.campaign_id.clone(),
            Arc::new(CampaignSlot {
                dir,
                sessions: Mutex::new(BTreeMap::new()),
            }),
        );
        Ok(())
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.0
            .sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::UnknownSession(id.to_string()))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/rubric", get(get_rubric))
        .route("/campaigns", post(create_campaign))
        .route("/campaigns/{id}", get(get_campaign))
        .route("/campaigns/{id}/sessions", post(create_session))
        .route("/campaigns/{id}/finalize", post(finalize_campaign))
        .route("/campaigns/{id}/result", get(get_result))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/scores", patch(patch_scores))
        .route("/sessions/{id}/submit", post(submit_session))
        .with_state(state)
}

/// Binds `addr` and serves until ctrl-c.
pub async fn serve(addr: SocketAddr, data_dir: impl Into<PathBuf>) -> std::io::Result<()> {
    let state = AppState::new(data_dir)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Parses a JSON body. An empty body means `T::default()`.
fn body<T: DeserializeOwned + Default>(bytes: &Bytes) -> Result<T, ApiError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(bytes).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => ApiError::InvalidRequest(e.to_string()),
        _ => ApiError::MalformedRequest(e.to_string()),
    })
}

fn header_evaluator(headers: &HeaderMap) -> Option<String> {
    headers
        .get(EVALUATOR_HEADER)
        .and_then(|v| v.to_str().ok())
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(str::to_string)
}

/// Drafts are private to their evaluator when the header is sent.
fn check_owner(headers: &HeaderMap, session: &Session) -> Result<(), ApiError> {
    match header_evaluator(headers) {
        Some(e) if e != session.evaluator_id => Err(ApiError::EvaluatorMismatch),
        _ => Ok(()),
    }
}

async fn get_rubric() -> Json<RubricDocument> {
    Json(RubricDocument::build(&WeightSet::prior()))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NewCampaign {
    campaign_id: Option<String>,
    entity_id: String,
    entity_kind: Option<EntityKind>,
    weights: Option<WeightSet>,
}

#[derive(Debug, Serialize)]
struct SessionBrief {
    session_id: String,
    evaluator_id: String,
    state: SessionState,
}

#[derive(Debug, Serialize)]
struct CampaignView {
    #[serde(flatten)]
    summary: CampaignSummary,
    weights: WeightSet,
    sessions: Vec<SessionBrief>,
}

async fn campaign_view(state: &AppState, slot: &CampaignSlot) -> Result<CampaignView, ApiError> {
    let campaign = slot.dir.load()?;
    let ids: Vec<String> = slot.sessions.lock().await.values().cloned().collect();
    let mut sessions = Vec::new();
    for id in ids {
        let s = state.session(&id)?;
        let s = s.lock().await;
        sessions.push(SessionBrief {
            session_id: s.session_id.clone(),
            evaluator_id: s.evaluator_id.clone(),
            state: s.state,
        });
    }
    Ok(CampaignView {
        summary: campaign.summary(),
        weights: campaign.weights,
        sessions,
    })
}

async fn create_campaign(State(state): State<AppState>, bytes: Bytes) -> Result<Response, ApiError> {
    let req: NewCampaign = body(&bytes)?;
    if req.entity_id.trim().is_empty() {
        return Err(ApiError::InvalidRequest("entity_id must not be empty".into()));
    }
    let id = req
        .campaign_id
        .unwrap_or_else(|| format!("campaign-{}", uuid::Uuid::new_v4().simple()));
    let campaign = Campaign::new(id, req.entity_id, req.entity_kind.unwrap_or(EntityKind::SoftwareAgent))?
        .with_weights(req.weights.unwrap_or_default());
    state.create_campaign(&campaign)?;
    tracing::info!(campaign = %campaign.campaign_id, "campaign created");
    let slot = state.campaign(&campaign.campaign_id)?;
    let view = campaign_view(&state, &slot).await?;
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

async fn get_campaign(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let slot = state.campaign(&id)?;
    Ok(Json(campaign_view(&state, &slot).await?).into_response())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NewSession {
    evaluator_id: Option<String>,
}

async fn create_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    bytes: Bytes,
) -> Result<Response, ApiError> {
    let req: NewSession = body(&bytes)?;
    let evaluator_id = req
        .evaluator_id
        .map(|e| e.trim().to_string())
        .filter(|e| !e.is_empty())
        .or_else(|| header_evaluator(&headers))
        .ok_or(ApiError::MissingEvaluator)?;
    let slot = state.campaign(&id)?;
    let mut sessions = slot.sessions.lock().await;
    let campaign = slot.dir.load()?;
    if campaign.status == CampaignStatus::Finalized {
        return Err(growai_core::CampaignError::CampaignFinalized.into());
    }
    if campaign.has_evaluator(&evaluator_id) || sessions.contains_key(&evaluator_id) {
        return Err(growai_core::CampaignError::DuplicateEvaluator(evaluator_id).into());
    }
    let session = Session::new(
        uuid::Uuid::new_v4().simple().to_string(),
        campaign.campaign_id,
        campaign.entity_id,
        evaluator_id.clone(),
        campaign.weights,
    );
    let summary = session.summary();
    sessions.insert(evaluator_id, session.session_id.clone());
    state
        .0
        .sessions
        .write()
        .expect("session map poisoned")
        .insert(session.session_id.clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(summary)).into_response())
}

async fn get_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let session = state.session(&id)?;
    let session = session.lock().await;
    check_owner(&headers, &session)?;
    Ok(Json(session.summary()).into_response())
}

#[derive(Debug, Serialize)]
struct ValidationFailure {
    error: &'static str,
    message: String,
    errors: Vec<FieldError>,
    summary: LiveSummary,
}

async fn patch_scores(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    bytes: Bytes,
) -> Result<Response, ApiError> {
    let update: ScoreUpdate = body(&bytes)?;
    let session = state.session(&id)?;
    let mut session = session.lock().await;
    check_owner(&headers, &session)?;
    let errors = session.apply(update)?;
    let summary = session.summary();
    if errors.is_empty() {
        return Ok(Json(summary).into_response());
    }
    let failure = ValidationFailure {
        error: "ValidationFailed",
        message: format!("{} field(s) rejected; valid fields were stored", errors.len()),
        errors,
        summary,
    };
    Ok((StatusCode::UNPROCESSABLE_ENTITY, Json(failure)).into_response())
}

async fn submit_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let session = state.session(&id)?;
    let mut session = session.lock().await;
    check_owner(&headers, &session)?;
    if session.state == SessionState::Submitted {
        return Err(ApiError::SessionSubmitted);
    }
    let slot = state.campaign(&session.campaign_id)?;
    let _guard = slot.sessions.lock().await;
    let campaign = slot.dir.load()?;
    if campaign.status == CampaignStatus::Finalized {
        return Err(growai_core::CampaignError::CampaignFinalized.into());
    }
    let run = session.score(&campaign.weights)?;
    slot.dir.add_run(run.clone())?;
    tracing::info!(session = %session.session_id, campaign = %session.campaign_id, verdict = %run.verdict, "run submitted");
    session.mark_submitted(run.clone());
    Ok(Json(run).into_response())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FinalizeRequest {
    weights: Option<WeightSet>,
}

async fn finalize_campaign(
    State(state): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> Result<Response, ApiError> {
    let req: FinalizeRequest = body(&bytes)?;
    let slot = state.campaign(&id)?;
    let _guard = slot.sessions.lock().await;
    let result = slot.dir.finalize(req.weights.as_ref())?;
    tracing::info!(campaign = %id, verdict = %result.verdict, "campaign finalized");
    Ok(Json(result).into_response())
}

async fn get_result(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let slot = state.campaign(&id)?;
    let _guard = slot.sessions.lock().await;
    Ok(Json(slot.dir.load_result()?).into_response())
}
