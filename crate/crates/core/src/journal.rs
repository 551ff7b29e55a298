//! AI Journal documents: parsing, invariant checks and evidence coverage.
//!
//! A journal is UTF-8 JSON. Parsing is total: any byte sequence yields
//! either a [`Journal`] that satisfies every invariant or a [`JournalError`]
//! that says where the document went wrong.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rubric::{ArenaId, Criterion, GameSpec};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JournalError {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("schema violation at {path}: {message}")]
    SchemaViolation { path: String, message: String },
    #[error("invariant violation at {path}: {message}")]
    InvariantViolation { path: String, message: String },
    #[error("unknown criterion `{0}`")]
    UnknownCriterion(String),
}

impl JournalError {
    fn invariant(path: impl Into<String>, message: impl Into<String>) -> Self {
        JournalError::InvariantViolation {
            path: path.into(),
            message: message.into(),
        }
    }
}

macro_rules! categories {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Closed set of journal evidence categories.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum EvidenceCategory {
            $($variant),*
        }

        impl EvidenceCategory {
            pub const ALL: &'static [EvidenceCategory] = &[$(EvidenceCategory::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(EvidenceCategory::$variant => $name),*
                }
            }
        }
    };
}

categories! {
    // standard entry structure
    ContextObjective => "context_objective",
    InitialParameters => "initial_parameters",
    TriggeringEvent => "triggering_event",
    OptionsAnalysed => "options_analysed",
    DecisionJustification => "decision_justification",
    Execution => "execution",
    AbComparison => "ab_comparison",
    ResourcesConsumed => "resources_consumed",
    EthicalCheck => "ethical_check",
    LessonLearnt => "lesson_learnt",
    // C1
    GrowthCurve => "growth_curve",
    RetentionTest => "retention_test",
    NoHumanInLoopCheck => "no_human_in_loop_check",
    PolicyCodeDiff => "policy_code_diff",
    ObjectiveRationale => "objective_rationale",
    SafetyGateCheck => "safety_gate_check",
    // C2
    DisruptionProfile => "disruption_profile",
    DisorderIndex => "disorder_index",
    EnergyWearBudget => "energy_wear_budget",
    CompensationLatency => "compensation_latency",
    PrioritizationRule => "prioritization_rule",
    // C3
    ResourceBudgetVsActual => "resource_budget_vs_actual",
    CodeParamDiff => "code_param_diff",
    AbTestNRuns => "ab_test_n_runs",
    FailureCase => "failure_case",
    CompromiseNote => "compromise_note",
    // C4
    AffectiveLabelSource => "affective_label_source",
    FusionDifficulty => "fusion_difficulty",
    InterventionReason => "intervention_reason",
    RiskStopSignal => "risk_stop_signal",
    StateChangeMeasure => "state_change_measure",
    // C5
    ThresholdAlarm => "threshold_alarm",
    PostEventAnalysis => "post_event_analysis",
    AlternativesWithPredictions => "alternatives_with_predictions",
    CtlDiff => "ctl_diff",
    SideEffectMonitor => "side_effect_monitor",
    // C6
    PrincipleConflictResolution => "principle_conflict_resolution",
    PlanMilestoneReplanning => "plan_milestone_replanning",
    LessonBase => "lesson_base",
    OriginalityFeasibilityGrid => "originality_feasibility_grid",
    ImpactMeasure => "impact_measure",
}

impl EvidenceCategory {
    /// Entry structure every journal is expected to follow.
    pub const STANDARD: &'static [EvidenceCategory] = &[
        EvidenceCategory::ContextObjective,
        EvidenceCategory::InitialParameters,
        EvidenceCategory::TriggeringEvent,
        EvidenceCategory::OptionsAnalysed,
        EvidenceCategory::DecisionJustification,
        EvidenceCategory::Execution,
        EvidenceCategory::AbComparison,
        EvidenceCategory::ResourcesConsumed,
        EvidenceCategory::EthicalCheck,
        EvidenceCategory::LessonLearnt,
    ];

    /// Criterion-specific evidence the journal must contain.
    pub fn checklist(criterion: Criterion) -> &'static [EvidenceCategory] {
        use EvidenceCategory::*;
        match criterion {
            Criterion::C1 => &[
                GrowthCurve,
                RetentionTest,
                NoHumanInLoopCheck,
                PolicyCodeDiff,
                ObjectiveRationale,
                SafetyGateCheck,
            ],
            Criterion::C2 => &[
                DisruptionProfile,
                DisorderIndex,
                EnergyWearBudget,
                CompensationLatency,
                PrioritizationRule,
            ],
            Criterion::C3 => &[
                ResourceBudgetVsActual,
                CodeParamDiff,
                AbTestNRuns,
                FailureCase,
                CompromiseNote,
            ],
            Criterion::C4 => &[
                AffectiveLabelSource,
                FusionDifficulty,
                InterventionReason,
                RiskStopSignal,
                StateChangeMeasure,
            ],
            Criterion::C5 => &[
                ThresholdAlarm,
                PostEventAnalysis,
                AlternativesWithPredictions,
                CtlDiff,
                SideEffectMonitor,
            ],
            Criterion::C6 => &[
                PrincipleConflictResolution,
                PlanMilestoneReplanning,
                LessonBase,
                OriginalityFeasibilityGrid,
                ImpactMeasure,
            ],
        }
    }
}

impl fmt::Display for EvidenceCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// UTC instant, written as ISO-8601 with a `Z` suffix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(pub DateTime<Utc>);

impl Timestamp {
    pub fn parse(s: &str) -> Result<Self, String> {
        if !s.ends_with('Z') {
            return Err(format!("timestamp `{s}` must be UTC with a `Z` suffix"));
        }
        DateTime::parse_from_rfc3339(s)
            .map(|dt| Timestamp(dt.with_timezone(&Utc)))
            .map_err(|e| format!("timestamp `{s}`: {e}"))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.to_rfc3339_opts(SecondsFormat::AutoSi, true))
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Timestamp::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Physical disorder measured at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSnapshot {
    pub backlash: f64,
    /// friction variation
    pub delta_mu: f64,
    /// internal energy stress index, kelvin-equivalent
    pub delta_t: f64,
    pub measured_at: Timestamp,
}

/// Supporting material attached to an entry. Diffs (policy, code, CTL) may be
/// machine-readable or prose; both are carried as text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Attachment {
    Text {
        name: String,
        content: String,
    },
    Diff {
        name: String,
        content: String,
    },
    DisorderSnapshot(DisorderSnapshot),
    AbTest {
        runs: u32,
        #[serde(default)]
        summary: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JournalEntry {
    pub entry_id: String,
    pub timestamp: Timestamp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<Criterion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arena: Option<ArenaId>,
    pub category: EvidenceCategory,
    pub body: String,
    #[serde(default)]
    pub attachments: Vec<Attachment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateSeverity {
    Cap,
    Reject,
}

/// A failed safety gate: caps scoped arenas at 2.0 or rejects the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SafetyGateEvent {
    pub gate_id: String,
    pub severity: GateSeverity,
    /// Empty means the whole run.
    #[serde(default)]
    pub scope: Vec<ArenaId>,
    #[serde(default)]
    pub evidence_entry: String,
    #[serde(default)]
    pub note: String,
}

impl SafetyGateEvent {
    pub fn covers_run(&self) -> bool {
        self.scope.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Journal {
    pub entity_id: String,
    pub run_id: String,
    #[serde(default)]
    pub entries: Vec<JournalEntry>,
    #[serde(default)]
    pub gate_events: Vec<SafetyGateEvent>,
}

/// Parses and checks a journal document.
pub fn parse_journal(raw: &[u8]) -> Result<Journal, JournalError> {
    let value: serde_json::Value =
        serde_json::from_slice(raw).map_err(|e| JournalError::MalformedDocument(e.to_string()))?;
    let journal: Journal = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        JournalError::SchemaViolation {
            path: if path == "." { "$".into() } else { format!("$.{path}") },
            message: e.into_inner().to_string(),
        }
    })?;
    check_invariants(journal)
}

/// Canonical serialization: pretty JSON, entries in (timestamp, entry_id) order.
pub fn serialize_journal(journal: &Journal) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(journal).expect("journal serializes");
    out.push(b'\n');
    out
}

fn check_invariants(mut journal: Journal) -> Result<Journal, JournalError> {
    if journal.entity_id.trim().is_empty() {
        return Err(JournalError::invariant("$.entity_id", "must not be empty"));
    }
    let mut ids = HashSet::new();
    let mut last_ts: Option<Timestamp> = None;
    let mut last_snapshot: Option<Timestamp> = None;
    for (i, entry) in journal.entries.iter().enumerate() {
        let at = |field: &str| format!("$.entries[{i}].{field}");
        if entry.entry_id.is_empty() {
            return Err(JournalError::invariant(at("entry_id"), "must not be empty"));
        }
        if !ids.insert(entry.entry_id.as_str()) {
            return Err(JournalError::invariant(
                at("entry_id"),
                format!("duplicate entry_id `{}`", entry.entry_id),
            ));
        }
        if let Some(arena) = entry.arena {
            match entry.criterion {
                None => {
                    return Err(JournalError::invariant(
                        at("arena"),
                        format!("arena {arena} given without a criterion"),
                    ))
                }
                Some(c) if c != arena.criterion() => {
                    return Err(JournalError::invariant(
                        at("arena"),
                        format!("arena {arena} belongs to {}, entry says {c}", arena.criterion()),
                    ))
                }
                _ => {}
            }
        }
        if last_ts.is_some_and(|prev| entry.timestamp < prev) {
            return Err(JournalError::invariant(
                at("timestamp"),
                "timestamps must be non-decreasing",
            ));
        }
        last_ts = Some(entry.timestamp);
        for (j, att) in entry.attachments.iter().enumerate() {
            let at = |field: &str| format!("$.entries[{i}].attachments[{j}].{field}");
            match att {
                Attachment::DisorderSnapshot(snap) => {
                    if !(snap.backlash >= 0.0 && snap.backlash.is_finite()) {
                        return Err(JournalError::invariant(at("backlash"), "must be finite and >= 0"));
                    }
                    if !snap.delta_mu.is_finite() || !snap.delta_t.is_finite() {
                        return Err(JournalError::invariant(at("delta_mu"), "must be finite"));
                    }
                    if last_snapshot.is_some_and(|prev| snap.measured_at < prev) {
                        return Err(JournalError::invariant(
                            at("measured_at"),
                            "disorder snapshots must be non-decreasing in time",
                        ));
                    }
                    last_snapshot = Some(snap.measured_at);
                }
                Attachment::AbTest { runs, .. } if *runs == 0 => {
                    return Err(JournalError::invariant(at("runs"), "A/B test needs at least one run"));
                }
                _ => {}
            }
        }
    }
    let mut gate_ids = HashSet::new();
    for (i, gate) in journal.gate_events.iter().enumerate() {
        let at = |field: &str| format!("$.gate_events[{i}].{field}");
        if gate.gate_id.is_empty() || !gate_ids.insert(gate.gate_id.as_str()) {
            return Err(JournalError::invariant(at("gate_id"), "gate_id must be non-empty and unique"));
        }
        if gate.severity == GateSeverity::Cap && gate.scope.is_empty() {
            return Err(JournalError::invariant(at("scope"), "a CAP gate needs a non-empty scope"));
        }
        if !ids.contains(gate.evidence_entry.as_str()) {
            return Err(JournalError::invariant(
                at("evidence_entry"),
                format!("`{}` does not name a journal entry", gate.evidence_entry),
            ));
        }
    }
    // equal timestamps: canonical order by entry_id
    journal
        .entries
        .sort_by(|a, b| (a.timestamp, &a.entry_id).cmp(&(b.timestamp, &b.entry_id)));
    Ok(journal)
}

/// Count of checklist categories present in a journal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub present: usize,
    pub total: usize,
}

impl Coverage {
    pub fn ratio(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.present as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionCoverage {
    pub criterion: Criterion,
    pub present: Vec<EvidenceCategory>,
    pub missing: Vec<EvidenceCategory>,
    pub coverage: Coverage,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateSummary {
    pub gate_id: String,
    pub severity: GateSeverity,
    /// `"run"` or the comma-separated arena labels.
    pub scope: String,
    pub evidence_entry: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbTestSummary {
    pub entry_id: String,
    pub runs: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub entity_id: String,
    pub run_id: String,
    pub entry_count: usize,
    pub standard_structure: CriterionlessCoverage,
    pub criteria: Vec<CriterionCoverage>,
    pub gates: Vec<GateSummary>,
    pub ab_tests: Vec<AbTestSummary>,
    /// False when any mandatory category is missing. Scoring still proceeds.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionlessCoverage {
    pub present: Vec<EvidenceCategory>,
    pub missing: Vec<EvidenceCategory>,
    pub coverage: Coverage,
}

fn categories_present(journal: &Journal) -> BTreeSet<EvidenceCategory> {
    journal.entries.iter().map(|e| e.category).collect()
}

fn split(
    present: &BTreeSet<EvidenceCategory>,
    checklist: &[EvidenceCategory],
) -> (Vec<EvidenceCategory>, Vec<EvidenceCategory>) {
    checklist.iter().partition(|c| present.contains(c))
}

/// Per-criterion coverage report. Never fails and never mutates the journal.
pub fn validate_journal(journal: &Journal, registry: &[GameSpec]) -> ValidationReport {
    let present = categories_present(journal);
    let criteria: Vec<_> = registry
        .iter()
        .map(|game| {
            let (have, missing) = split(&present, game.evidence_checklist);
            let coverage = Coverage {
                present: have.len(),
                total: game.evidence_checklist.len(),
            };
            CriterionCoverage {
                criterion: game.criterion,
                present: have,
                missing,
                coverage,
                ratio: coverage.ratio(),
            }
        })
        .collect();
    let (have, missing) = split(&present, EvidenceCategory::STANDARD);
    let standard_structure = CriterionlessCoverage {
        coverage: Coverage {
            present: have.len(),
            total: EvidenceCategory::STANDARD.len(),
        },
        present: have,
        missing,
    };
    let gates = journal
        .gate_events
        .iter()
        .map(|g| GateSummary {
            gate_id: g.gate_id.clone(),
            severity: g.severity,
            scope: if g.covers_run() {
                "run".to_string()
            } else {
                g.scope.iter().map(|a| a.label()).collect::<Vec<_>>().join(",")
            },
            evidence_entry: g.evidence_entry.clone(),
            note: g.note.clone(),
        })
        .collect();
    let ab_tests = journal
        .entries
        .iter()
        .flat_map(|e| {
            e.attachments.iter().filter_map(move |a| match a {
                Attachment::AbTest { runs, .. } => Some(AbTestSummary {
                    entry_id: e.entry_id.clone(),
                    runs: *runs,
                }),
                _ => None,
            })
        })
        .collect();
    let complete = criteria.iter().all(|c| c.missing.is_empty())
        && standard_structure.missing.is_empty();
    ValidationReport {
        entity_id: journal.entity_id.clone(),
        run_id: journal.run_id.clone(),
        entry_count: journal.entries.len(),
        standard_structure,
        criteria,
        gates,
        ab_tests,
        complete,
    }
}

/// Set-semantics coverage of one criterion's checklist.
pub fn evidence_coverage(journal: &Journal, criterion: Criterion) -> Coverage {
    let present = categories_present(journal);
    let checklist = EvidenceCategory::checklist(criterion);
    Coverage {
        present: checklist.iter().filter(|c| present.contains(c)).count(),
        total: checklist.len(),
    }
}

/// [`evidence_coverage`] keyed by a textual criterion id.
pub fn evidence_coverage_by_id(journal: &Journal, criterion: &str) -> Result<Coverage, JournalError> {
    let criterion: Criterion = criterion
        .parse()
        .map_err(|_| JournalError::UnknownCriterion(criterion.to_string()))?;
    Ok(evidence_coverage(journal, criterion))
}

/// Coverage ratio of every criterion, for reports.
pub fn coverage_table(journal: &Journal) -> BTreeMap<Criterion, Coverage> {
    Criterion::ALL
        .into_iter()
        .map(|c| (c, evidence_coverage(journal, c)))
        .collect()
}
