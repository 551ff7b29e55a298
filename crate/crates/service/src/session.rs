//! Draft scoring sessions and the live summary returned after every edit.

use std::collections::{BTreeMap, HashSet};

use growai_core::decimal::{validate_score, Exact, Tenths, Thousandths};
use growai_core::journal::SafetyGateEvent;
use growai_core::report::Figure;
use growai_core::rubric::{ArenaId, Criterion, WeightSet};
use growai_core::scoring::{cap_scores, partial_composite, score_run, ArenaScore, RunResult, RunVerdict, ScoreSheet};
use serde::{Deserialize, Serialize};

use crate::error::{ApiError, FieldError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SessionState {
    Draft,
    Submitted,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub session_id: String,
    pub campaign_id: String,
    pub entity_id: String,
    pub evaluator_id: String,
    pub weights: WeightSet,
    /// Scores as entered, before gating.
    pub draft_scores: BTreeMap<ArenaId, Tenths>,
    pub draft_gates: Vec<SafetyGateEvent>,
    pub state: SessionState,
    pub revision: u64,
    pub run: Option<RunResult>,
}

/// Body of `PATCH /sessions/{id}/scores`.
///
/// `scores` maps arena labels to decimal text; `null` clears a score.
/// `gates`, when present, replaces the draft gate list.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreUpdate {
    #[serde(default)]
    pub scores: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub gates: Option<serde_json::Value>,
    #[serde(default)]
    pub expected_revision: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiveArena {
    pub arena: ArenaId,
    pub entered: Tenths,
    pub value: Tenths,
    pub capped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap_source: Option<String>,
    pub knockout: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiveCriterion {
    pub criterion: Criterion,
    pub scored: usize,
    /// Present once all four arenas are scored.
    pub composite: Option<Thousandths>,
    pub display: Option<String>,
    pub knockout_arenas: Vec<ArenaId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiveSummary {
    pub session_id: String,
    pub campaign_id: String,
    pub evaluator_id: String,
    pub state: SessionState,
    pub revision: u64,
    pub scored: usize,
    pub missing: Vec<ArenaId>,
    pub arenas: Vec<LiveArena>,
    pub criteria: Vec<LiveCriterion>,
    pub gates: Vec<SafetyGateEvent>,
    pub knockout: bool,
    pub rejected_by: Option<String>,
    pub provisional_gui: Option<Figure>,
    pub provisional_verdict: Option<RunVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RunResult>,
}

impl Session {
    pub fn new(
        session_id: String,
        campaign_id: String,
        entity_id: String,
        evaluator_id: String,
        weights: WeightSet,
    ) -> Self {
        Session {
            session_id,
            campaign_id,
            entity_id,
            evaluator_id,
            weights,
            draft_scores: BTreeMap::new(),
            draft_gates: Vec::new(),
            state: SessionState::Draft,
            revision: 0,
            run: None,
        }
    }

    fn ensure_draft(&self) -> Result<(), ApiError> {
        match self.state {
            SessionState::Draft => Ok(()),
            SessionState::Submitted => Err(ApiError::SessionSubmitted),
        }
    }

    /// Stores every valid field of `update` and reports the rest.
    /// The revision advances when anything was stored.
    pub fn apply(&mut self, update: ScoreUpdate) -> Result<Vec<FieldError>, ApiError> {
        self.ensure_draft()?;
        if let Some(expected) = update.expected_revision {
            if expected != self.revision {
                return Err(ApiError::RevisionMismatch {
                    expected,
                    current: self.revision,
                });
            }
        }
        let mut errors = Vec::new();
        let mut changed = false;
        for (key, value) in update.scores {
            let arena = match ArenaId::parse(&key) {
                Ok(a) => a,
                Err(e) => {
                    errors.push(FieldError {
                        field: key,
                        arena: None,
                        reason: "UnknownArena".into(),
                        message: e.to_string(),
                    });
                    continue;
                }
            };
            let field_error = |reason: &str, message: String| FieldError {
                field: key.clone(),
                arena: Some(arena),
                reason: reason.into(),
                message,
            };
            match value {
                serde_json::Value::Null => {
                    changed |= self.draft_scores.remove(&arena).is_some();
                }
                serde_json::Value::String(text) => match validate_score(&text) {
                    Ok(t) => {
                        self.draft_scores.insert(arena, t);
                        changed = true;
                    }
                    Err(e) => errors.push(field_error(e.code(), e.to_string())),
                },
                other => errors.push(field_error(
                    "NotDecimalText",
                    format!("scores are sent as decimal text such as \"2.5\", got {other}"),
                )),
            }
        }
        if let Some(raw) = update.gates {
            match parse_gates(raw) {
                Ok(gates) => {
                    self.draft_gates = gates;
                    changed = true;
                }
                Err(e) => errors.push(e),
            }
        }
        if changed {
            self.revision += 1;
        }
        Ok(errors)
    }

    pub fn sheet(&self) -> Result<ScoreSheet, ApiError> {
        let missing: Vec<_> = ArenaId::all().filter(|a| !self.draft_scores.contains_key(a)).collect();
        if !missing.is_empty() {
            return Err(ApiError::IncompleteSheet { missing });
        }
        let scores = self.draft_scores.iter().map(|(&a, &t)| ArenaScore::new(a, t));
        ScoreSheet::new(&self.evaluator_id, &self.entity_id, &self.session_id, scores, "")
            .map_err(|e| ApiError::InvalidRequest(e.to_string()))
    }

    /// Scores the complete draft. Does not change the session.
    pub fn score(&self, weights: &WeightSet) -> Result<RunResult, ApiError> {
        self.ensure_draft()?;
        let sheet = self.sheet()?;
        score_run(&sheet, &self.draft_gates, weights).map_err(|e| ApiError::InvalidRequest(e.to_string()))
    }

    pub fn mark_submitted(&mut self, run: RunResult) {
        self.state = SessionState::Submitted;
        self.revision += 1;
        self.run = Some(run);
    }

    pub fn summary(&self) -> LiveSummary {
        let mut gated: BTreeMap<_, _> = self.draft_scores.iter().map(|(&a, &t)| (a, ArenaScore::new(a, t))).collect();
        // gates are validated on entry
        let rejected_by = cap_scores(&mut gated, &self.draft_gates).expect("stored gates are well formed");
        let arenas: Vec<_> = gated
            .values()
            .map(|s| LiveArena {
                arena: s.arena,
                entered: self.draft_scores[&s.arena],
                value: s.value,
                capped: s.capped,
                cap_source: s.cap_source.clone(),
                knockout: s.value < Tenths::FLOOR,
            })
            .collect();
        let criteria = Criterion::ALL
            .into_iter()
            .map(|c| {
                let composite = partial_composite(c, &gated, self.weights.get(c)).expect("weights match criterion");
                LiveCriterion {
                    criterion: c,
                    scored: c.arenas().iter().filter(|a| gated.contains_key(a)).count(),
                    display: composite.as_ref().map(|x| Exact::new(x.value.0, 1000).round_half_up(2)),
                    composite: composite.as_ref().map(|x| x.value),
                    knockout_arenas: c
                        .arenas()
                        .into_iter()
                        .filter(|a| gated.get(a).is_some_and(|s| s.value < Tenths::FLOOR))
                        .collect(),
                }
            })
            .collect();
        let complete = gated.len() == 24;
        let run = if complete {
            self.run.clone().or_else(|| {
                let sheet = self.sheet().ok()?;
                score_run(&sheet, &self.draft_gates, &self.weights).ok()
            })
        } else {
            None
        };
        LiveSummary {
            session_id: self.session_id.clone(),
            campaign_id: self.campaign_id.clone(),
            evaluator_id: self.evaluator_id.clone(),
            state: self.state,
            revision: self.revision,
            scored: gated.len(),
            missing: ArenaId::all().filter(|a| !gated.contains_key(a)).collect(),
            knockout: arenas.iter().any(|a| a.knockout),
            arenas,
            criteria,
            gates: self.draft_gates.clone(),
            rejected_by,
            provisional_gui: run.as_ref().map(|r| r.run_gui.into()),
            provisional_verdict: run.as_ref().map(|r| r.verdict),
            run: self.run.clone(),
        }
    }
}

fn parse_gates(raw: serde_json::Value) -> Result<Vec<SafetyGateEvent>, FieldError> {
    let invalid = |reason: &str, message: String| FieldError {
        field: "gates".into(),
        arena: None,
        reason: reason.into(),
        message,
    };
    let gates: Vec<SafetyGateEvent> =
        serde_json::from_value(raw).map_err(|e| invalid("InvalidGate", e.to_string()))?;
    let mut ids = HashSet::new();
    for g in &gates {
        if g.gate_id.is_empty() || !ids.insert(g.gate_id.as_str()) {
            return Err(invalid("InvalidGate", format!("gate id `{}` is empty or repeated", g.gate_id)));
        }
    }
    cap_scores(&mut BTreeMap::new(), &gates).map_err(|e| invalid("MalformedGate", e.to_string()))?;
    Ok(gates)
}
