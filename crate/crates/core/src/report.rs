//! Campaign reports in Markdown (for people) and JSON (for machines).
//!
//! Rounded figures are for display only; the JSON form always carries the
//! exact rationals and the verdict is copied from the result, never
//! recomputed from rounded values.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::campaign::{arena_floor, Campaign, CampaignResult, CampaignStatus, CampaignVerdict, EntityKind, MaturityBand};
use crate::decimal::Exact;
use crate::journal::Coverage;
use crate::rubric::{ArenaId, Criterion};
use crate::scoring::RunVerdict;

pub const REPORT_VERSION: &str = "growai-report/1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error("campaign `{0}` is not finalized")]
    CampaignNotFinalized(String),
    #[error("result belongs to campaign `{result}`, not `{campaign}`")]
    ResultMismatch { campaign: String, result: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Markdown,
}

/// An exact value next to its two-decimal half-up display.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Figure {
    pub exact: Exact,
    pub display: String,
}

impl From<Exact> for Figure {
    fn from(exact: Exact) -> Self {
        Figure {
            display: exact.round_half_up(2),
            exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionRow {
    pub criterion: Criterion,
    pub title: String,
    pub game_name: String,
    pub composite: Figure,
    pub weights_hundredths: [u8; 4],
    pub eliminated_arenas: Vec<ArenaId>,
    pub evidence_coverage: Option<Coverage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArenaRow {
    pub arena: ArenaId,
    pub name: String,
    pub mean: Figure,
    pub eliminated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRow {
    pub run_id: String,
    pub evaluator_id: String,
    pub run_gui: Figure,
    pub verdict: RunVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub report_version: String,
    pub campaign_id: String,
    pub entity_id: String,
    pub entity_kind: EntityKind,
    pub run_count: usize,
    pub grow_up_index: Figure,
    pub verdict: CampaignVerdict,
    pub maturity_band: MaturityBand,
    pub criteria: Vec<CriterionRow>,
    pub arenas: Vec<ArenaRow>,
    pub runs: Vec<RunRow>,
    pub result: CampaignResult,
}

impl Report {
    pub fn build(
        campaign: &Campaign,
        result: &CampaignResult,
        coverage: Option<&BTreeMap<Criterion, Coverage>>,
    ) -> Result<Self, ReportError> {
        if campaign.status != CampaignStatus::Finalized {
            return Err(ReportError::CampaignNotFinalized(campaign.campaign_id.clone()));
        }
        if campaign.campaign_id != result.campaign_id {
            return Err(ReportError::ResultMismatch {
                campaign: campaign.campaign_id.clone(),
                result: result.campaign_id.clone(),
            });
        }
        let criteria = Criterion::ALL
            .into_iter()
            .map(|c| CriterionRow {
                criterion: c,
                title: c.title().to_string(),
                game_name: c.game_name().to_string(),
                composite: result.final_composites[&c].into(),
                weights_hundredths: result.weights.get(c).hundredths(),
                eliminated_arenas: result
                    .eliminated_arenas
                    .iter()
                    .copied()
                    .filter(|a| a.criterion() == c)
                    .collect(),
                evidence_coverage: coverage.and_then(|m| m.get(&c).copied()),
            })
            .collect();
        let floor = arena_floor();
        let arenas = result
            .final_arena_means
            .iter()
            .map(|(&arena, &mean)| ArenaRow {
                arena,
                name: arena.name().to_string(),
                mean: mean.into(),
                eliminated: mean < floor,
            })
            .collect();
        let runs = campaign
            .runs
            .iter()
            .map(|r| RunRow {
                run_id: r.run_id.clone(),
                evaluator_id: r.evaluator_id().to_string(),
                run_gui: r.run_gui.into(),
                verdict: r.verdict,
            })
            .collect();
        Ok(Report {
            report_version: REPORT_VERSION.to_string(),
            campaign_id: result.campaign_id.clone(),
            entity_id: result.entity_id.clone(),
            entity_kind: result.entity_kind,
            run_count: result.run_count,
            grow_up_index: result.grow_up_index.into(),
            verdict: result.verdict,
            maturity_band: result.maturity_band,
            criteria,
            arenas,
            runs,
            result: result.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "# GROW-AI campaign report: {}\n", self.entity_id);
        let _ = writeln!(w, "- Campaign: `{}`", self.campaign_id);
        let _ = writeln!(w, "- Entity kind: {}", self.entity_kind);
        let _ = writeln!(w, "- Runs: {}", self.run_count);
        let _ = writeln!(w, "- Maturity band: {}", self.maturity_band);
        let _ = writeln!(w);
        let _ = writeln!(
            w,
            "**Grow Up Index: {} — {}** (exact: {})\n",
            self.grow_up_index.display, self.verdict, self.grow_up_index.exact
        );
        if !self.result.rejected_runs.is_empty() {
            let _ = writeln!(w, "Rejected runs: {}\n", self.result.rejected_runs.join(", "));
        }

        let _ = writeln!(w, "## Criteria\n");
        let _ = writeln!(w, "| Criterion | Game | Composite | Weights | Eliminated arenas | Evidence coverage |");
        let _ = writeln!(w, "|---|---|---|---|---|---|");
        for row in &self.criteria {
            let weights = row
                .weights_hundredths
                .iter()
                .map(|h| format!("0.{h:02}"))
                .collect::<Vec<_>>()
                .join(" / ");
            let eliminated = if row.eliminated_arenas.is_empty() {
                "none".to_string()
            } else {
                row.eliminated_arenas.iter().map(|a| a.label()).collect::<Vec<_>>().join(", ")
            };
            let coverage = row
                .evidence_coverage
                .map(|c| format!("{}/{}", c.present, c.total))
                .unwrap_or_else(|| "n/a".into());
            let _ = writeln!(
                w,
                "| {} {} | {} | {} | {} | {} | {} |",
                row.criterion, row.title, row.game_name, row.composite.display, weights, eliminated, coverage
            );
        }

        let _ = writeln!(w, "\n## Arena means\n");
        let _ = writeln!(w, "| Arena | Name | Mean | Status |");
        let _ = writeln!(w, "|---|---|---|---|");
        for row in &self.arenas {
            let status = if row.eliminated { "ELIMINATED" } else { "ok" };
            let _ = writeln!(w, "| {} | {} | {} | {} |", row.arena, row.name, row.mean.display, status);
        }

        let _ = writeln!(w, "\n## Runs\n");
        let _ = writeln!(w, "| Run | Evaluator | Run index | Verdict |");
        let _ = writeln!(w, "|---|---|---|---|");
        for row in &self.runs {
            let _ = writeln!(
                w,
                "| {} | {} | {} | {} |",
                row.run_id, row.evaluator_id, row.run_gui.display, row.verdict
            );
        }
        out
    }
}

/// Renders a finalized campaign. Output is a pure function of the inputs.
pub fn render_report(
    campaign: &Campaign,
    result: &CampaignResult,
    coverage: Option<&BTreeMap<Criterion, Coverage>>,
    format: ReportFormat,
) -> Result<String, ReportError> {
    let report = Report::build(campaign, result, coverage)?;
    Ok(match format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Markdown => report.to_markdown(),
    })
}
