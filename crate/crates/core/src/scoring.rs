//! Exact scoring of one evaluator's sheet: safety-gate caps, weighted
//! composites, knockout detection and the run-level Grow Up Index.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decimal::{validate_score, Exact, ScoreError, Tenths, Thousandths};
use crate::journal::{GateSeverity, SafetyGateEvent};
use crate::rubric::{ArenaId, Criterion, RubricError, WeightSet, WeightVector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScoringError {
    #[error("{arena}: {error}")]
    InvalidScore { arena: String, error: ScoreError },
    #[error("unknown arena `{0}`")]
    UnknownArena(String),
    #[error("arena {0} scored more than once")]
    DuplicateArena(ArenaId),
    #[error("sheet incomplete, missing: {}", labels(.missing))]
    IncompleteSheet { missing: Vec<ArenaId> },
    #[error("evaluator_id must not be empty")]
    MissingEvaluator,
    #[error("arena {arena}: {reason}")]
    InconsistentCap { arena: ArenaId, reason: String },
    #[error("gate `{gate_id}` is malformed: {reason}")]
    MalformedGate { gate_id: String, reason: String },
    #[error("weights for {got} cannot score {expected}")]
    WeightCriterionMismatch { expected: Criterion, got: Criterion },
    #[error("invalid score sheet document: {0}")]
    Document(String),
}

fn labels(arenas: &[ArenaId]) -> String {
    arenas.iter().map(|a| a.label()).collect::<Vec<_>>().join(", ")
}

impl From<RubricError> for ScoringError {
    fn from(e: RubricError) -> Self {
        match e {
            RubricError::UnknownArena(a) => ScoringError::UnknownArena(a),
            other => ScoringError::Document(other.to_string()),
        }
    }
}

/// One arena's score after gating.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArenaScore {
    pub arena: ArenaId,
    pub value: Tenths,
    #[serde(default)]
    pub capped: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap_source: Option<String>,
}

impl ArenaScore {
    pub fn new(arena: ArenaId, value: Tenths) -> Self {
        ArenaScore {
            arena,
            value,
            capped: false,
            cap_source: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScore {
    arena: String,
    value: String,
    #[serde(default)]
    capped: bool,
    #[serde(default)]
    cap_source: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSheet {
    evaluator_id: String,
    entity_id: String,
    run_id: String,
    scores: Vec<RawScore>,
    #[serde(default)]
    notes: String,
}

/// All 24 arena scores from one evaluator for one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSheet")]
pub struct ScoreSheet {
    pub evaluator_id: String,
    pub entity_id: String,
    pub run_id: String,
    #[serde(serialize_with = "scores_as_list")]
    scores: BTreeMap<ArenaId, ArenaScore>,
    pub notes: String,
}

fn scores_as_list<S: serde::Serializer>(
    scores: &BTreeMap<ArenaId, ArenaScore>,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    serializer.collect_seq(scores.values())
}

impl TryFrom<RawSheet> for ScoreSheet {
    type Error = ScoringError;

    fn try_from(raw: RawSheet) -> Result<Self, ScoringError> {
        let mut scores = Vec::with_capacity(raw.scores.len());
        for s in raw.scores {
            let arena = ArenaId::parse(&s.arena)?;
            let value = validate_score(&s.value).map_err(|error| ScoringError::InvalidScore {
                arena: arena.label(),
                error,
            })?;
            scores.push(ArenaScore {
                arena,
                value,
                capped: s.capped,
                cap_source: s.cap_source,
            });
        }
        ScoreSheet::new(raw.evaluator_id, raw.entity_id, raw.run_id, scores, raw.notes)
    }
}

impl ScoreSheet {
    pub fn new(
        evaluator_id: impl Into<String>,
        entity_id: impl Into<String>,
        run_id: impl Into<String>,
        scores: impl IntoIterator<Item = ArenaScore>,
        notes: impl Into<String>,
    ) -> Result<Self, ScoringError> {
        let evaluator_id = evaluator_id.into();
        if evaluator_id.trim().is_empty() {
            return Err(ScoringError::MissingEvaluator);
        }
        let mut map = BTreeMap::new();
        for score in scores {
            if score.capped && (score.cap_source.is_none() || score.value > Tenths::FLOOR) {
                return Err(ScoringError::InconsistentCap {
                    arena: score.arena,
                    reason: "a capped score needs a cap_source and a value <= 2.0".into(),
                });
            }
            if let Some(prev) = map.insert(score.arena, score) {
                return Err(ScoringError::DuplicateArena(prev.arena));
            }
        }
        let missing: Vec<_> = ArenaId::all().filter(|a| !map.contains_key(a)).collect();
        if !missing.is_empty() {
            return Err(ScoringError::IncompleteSheet { missing });
        }
        Ok(ScoreSheet {
            evaluator_id,
            entity_id: entity_id.into(),
            run_id: run_id.into(),
            scores: map,
            notes: notes.into(),
        })
    }

    /// Sheet from plain tenths, arena order as [`ArenaId::all`].
    pub fn from_tenths(
        evaluator_id: impl Into<String>,
        entity_id: impl Into<String>,
        run_id: impl Into<String>,
        tenths: [Tenths; 24],
    ) -> Result<Self, ScoringError> {
        let scores = ArenaId::all().zip(tenths).map(|(a, t)| ArenaScore::new(a, t));
        ScoreSheet::new(evaluator_id, entity_id, run_id, scores, "")
    }

    pub fn score(&self, arena: ArenaId) -> &ArenaScore {
        &self.scores[&arena]
    }

    pub fn value(&self, arena: ArenaId) -> Tenths {
        self.scores[&arena].value
    }

    pub fn scores(&self) -> impl Iterator<Item = &ArenaScore> {
        self.scores.values()
    }

    pub fn score_map(&self) -> &BTreeMap<ArenaId, ArenaScore> {
        &self.scores
    }
}

/// Score sheet file: a sheet plus optional gate events. Read it with
/// [`parse_sheet_document`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SheetDocument {
    #[serde(flatten)]
    pub sheet: ScoreSheet,
    pub gates: Vec<SafetyGateEvent>,
}

pub fn parse_sheet_document(raw: &[u8]) -> Result<SheetDocument, ScoringError> {
    #[derive(Deserialize)]
    struct Doc {
        #[serde(flatten)]
        sheet: serde_json::Map<String, serde_json::Value>,
        #[serde(default)]
        gates: Vec<RawGate>,
    }
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct RawGate {
        gate_id: String,
        severity: GateSeverity,
        #[serde(default)]
        scope: Vec<String>,
        #[serde(default)]
        evidence_entry: String,
        #[serde(default)]
        note: String,
    }
    let doc: Doc = serde_json::from_slice(raw).map_err(|e| ScoringError::Document(e.to_string()))?;
    let raw: RawSheet = serde_json::from_value(serde_json::Value::Object(doc.sheet))
        .map_err(|e| ScoringError::Document(e.to_string()))?;
    let gates = doc
        .gates
        .into_iter()
        .map(|g| {
            Ok(SafetyGateEvent {
                scope: g
                    .scope
                    .iter()
                    .map(|a| ArenaId::parse(a).map_err(|_| ScoringError::UnknownArena(a.clone())))
                    .collect::<Result<_, ScoringError>>()?,
                gate_id: g.gate_id,
                severity: g.severity,
                evidence_entry: g.evidence_entry,
                note: g.note,
            })
        })
        .collect::<Result<Vec<_>, ScoringError>>()?;
    Ok(SheetDocument {
        sheet: ScoreSheet::try_from(raw)?,
        gates,
    })
}

/// Caps in-scope arenas of `scores` at 2.0. Arenas absent from `scores`
/// are skipped, so partially filled drafts can be gated too. Returns the
/// first REJECT gate, if any.
pub fn cap_scores(
    scores: &mut BTreeMap<ArenaId, ArenaScore>,
    gates: &[SafetyGateEvent],
) -> Result<Option<String>, ScoringError> {
    let mut rejected_by = None;
    for gate in gates {
        match gate.severity {
            GateSeverity::Cap => {
                if gate.scope.is_empty() {
                    return Err(ScoringError::MalformedGate {
                        gate_id: gate.gate_id.clone(),
                        reason: "CAP gate with an empty scope".into(),
                    });
                }
                for arena in &gate.scope {
                    if let Some(score) = scores.get_mut(arena) {
                        score.value = score.value.min(Tenths::FLOOR);
                        if !score.capped {
                            score.capped = true;
                            score.cap_source = Some(gate.gate_id.clone());
                        }
                    }
                }
            }
            GateSeverity::Reject => {
                if rejected_by.is_none() {
                    rejected_by = Some(gate.gate_id.clone());
                }
            }
        }
    }
    Ok(rejected_by)
}

/// Applies gate events to a complete sheet. Idempotent.
pub fn apply_gates(
    sheet: &ScoreSheet,
    gates: &[SafetyGateEvent],
) -> Result<(ScoreSheet, Option<String>), ScoringError> {
    let mut out = sheet.clone();
    let rejected_by = cap_scores(&mut out.scores, gates)?;
    Ok((out, rejected_by))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionComposite {
    pub criterion: Criterion,
    /// Σ weight_hundredths × score_tenths.
    pub value: Thousandths,
    pub knockout_arenas: Vec<ArenaId>,
}

/// Composite over whatever scores are available; `None` until all four
/// arenas of the criterion are present.
pub fn partial_composite(
    criterion: Criterion,
    scores: &BTreeMap<ArenaId, ArenaScore>,
    weights: &WeightVector,
) -> Result<Option<CriterionComposite>, ScoringError> {
    if weights.criterion() != criterion {
        return Err(ScoringError::WeightCriterionMismatch {
            expected: criterion,
            got: weights.criterion(),
        });
    }
    let mut value = 0i64;
    let mut knockout_arenas = Vec::new();
    for (arena, w) in criterion.arenas().into_iter().zip(weights.hundredths()) {
        let Some(score) = scores.get(&arena) else {
            return Ok(None);
        };
        value += i64::from(w) * i64::from(score.value.get());
        if score.value < Tenths::FLOOR {
            knockout_arenas.push(arena);
        }
    }
    Ok(Some(CriterionComposite {
        criterion,
        value: Thousandths(value),
        knockout_arenas,
    }))
}

pub fn criterion_composite(
    criterion: Criterion,
    sheet: &ScoreSheet,
    weights: &WeightVector,
) -> Result<CriterionComposite, ScoringError> {
    Ok(partial_composite(criterion, &sheet.scores, weights)?
        .expect("a ScoreSheet always holds all 24 arenas"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RunVerdict {
    Ok,
    Knockout,
    Rejected,
}

impl fmt::Display for RunVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunVerdict::Ok => "OK",
            RunVerdict::Knockout => "KNOCKOUT",
            RunVerdict::Rejected => "REJECTED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub run_id: String,
    /// Post-gating sheet.
    pub sheet: ScoreSheet,
    pub composites: Vec<CriterionComposite>,
    pub run_gui: Exact,
    pub verdict: RunVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejected_by: Option<String>,
    #[serde(default)]
    pub gates: Vec<SafetyGateEvent>,
}

impl RunResult {
    pub fn evaluator_id(&self) -> &str {
        &self.sheet.evaluator_id
    }

    pub fn entity_id(&self) -> &str {
        &self.sheet.entity_id
    }
}

/// Mean of six thousandths composites as an exact rational.
pub fn grow_up_index(composites: &[CriterionComposite]) -> Exact {
    let sum: i64 = composites.iter().map(|c| c.value.0).sum();
    Exact::new(sum, 1000 * composites.len() as i64)
}

pub fn run_verdict(sheet: &ScoreSheet, rejected_by: Option<&str>) -> RunVerdict {
    if rejected_by.is_some() {
        RunVerdict::Rejected
    } else if sheet.scores().any(|s| s.value < Tenths::FLOOR) {
        RunVerdict::Knockout
    } else {
        RunVerdict::Ok
    }
}

/// Gates, scores and classifies one run.
pub fn score_run(
    sheet: &ScoreSheet,
    gates: &[SafetyGateEvent],
    weights: &WeightSet,
) -> Result<RunResult, ScoringError> {
    let (gated, rejected_by) = apply_gates(sheet, gates)?;
    let composites = Criterion::ALL
        .into_iter()
        .map(|c| criterion_composite(c, &gated, weights.get(c)))
        .collect::<Result<Vec<_>, _>>()?;
    let run_gui = grow_up_index(&composites);
    let verdict = run_verdict(&gated, rejected_by.as_deref());
    Ok(RunResult {
        run_id: gated.run_id.clone(),
        sheet: gated,
        composites,
        run_gui,
        verdict,
        rejected_by,
        gates: gates.to_vec(),
    })
}
