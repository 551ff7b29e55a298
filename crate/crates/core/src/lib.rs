//! Core library of the GROW-AI evaluation harness.
//!
//! - [`rubric`]: criteria, games, arenas and prior-expert weights
//! - [`journal`]: AI Journal parsing, validation and evidence coverage
//! - [`scoring`]: safety gates, exact composites and run verdicts
//! - [`weights`]: AHP, random index, least-squares weight fitting
//! - [`campaign`]: multi-evaluator aggregation, verdicts, persistence
//! - [`report`]: Markdown and JSON campaign reports
//!
//! All score arithmetic is integer or rational. See the crate's `examples/`
//! directory for one runnable walkthrough per capability.

pub mod campaign;
pub mod decimal;
pub mod journal;
pub mod report;
pub mod rubric;
pub mod scoring;
pub mod weights;

pub use campaign::{
    finalize_campaign, maturity_band, Campaign, CampaignDir, CampaignError, CampaignResult, CampaignStatus,
    CampaignVerdict, EntityKind, MaturityBand, MIN_RUNS,
};
pub use decimal::{validate_score, Exact, ScoreError, Tenths, Thousandths};
pub use journal::{
    evidence_coverage, parse_journal, validate_journal, EvidenceCategory, GateSeverity, Journal, JournalError,
    SafetyGateEvent, ValidationReport,
};
pub use report::{render_report, Report, ReportError, ReportFormat};
pub use rubric::{default_weights, rubric_registry, ArenaId, Criterion, GameSpec, RubricDocument, WeightSet, WeightVector};
pub use scoring::{
    apply_gates, criterion_composite, score_run, CriterionComposite, RunResult, RunVerdict, ScoreSheet, ScoringError,
};
pub use weights::{ahp_weights, fit_weights, normalize_weights, random_index, AhpResult, CalibrationError, PairwiseMatrix};
