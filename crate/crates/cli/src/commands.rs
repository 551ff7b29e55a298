use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use growai_core::campaign::{Campaign, CampaignDir, CampaignError, CampaignResult, EntityKind};
use growai_core::journal::{coverage_table, parse_journal, validate_journal, Journal, JournalError, ValidationReport};
use growai_core::report::{render_report, ReportFormat};
use growai_core::rubric::{rubric_registry, Criterion, RubricDocument, WeightSet, WeightVector};
use growai_core::scoring::{parse_sheet_document, score_run, RunResult, ScoringError};
use growai_core::weights::{
    ahp_weights, derive_random_index, fit_weights_report, random_index, AhpResult, CalibrationObservation,
    PairwiseMatrix,
};
use serde::Serialize;

use crate::{CampaignCommand, Command, Format, ReportFormatArg, RubricCommand, ScoreArgs, WeightsCommand};

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_INVARIANT: u8 = 3;
pub const EXIT_NOT_FINALIZED: u8 = 4;

/// An error together with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code,
            error: error.into(),
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::new(EXIT_FAILURE, e)
    }
}

type Result<T, E = Failure> = std::result::Result<T, E>;

fn journal_code(e: &JournalError) -> u8 {
    match e {
        JournalError::InvariantViolation { .. } => EXIT_INVARIANT,
        _ => EXIT_INVALID,
    }
}

fn campaign_failure(e: CampaignError) -> Failure {
    let code = match e {
        CampaignError::NotFinalized => EXIT_NOT_FINALIZED,
        CampaignError::InvalidId(_) => EXIT_INVALID,
        CampaignError::Io { .. } | CampaignError::Json { .. } => EXIT_FAILURE,
        _ => EXIT_INVARIANT,
    };
    Failure::new(code, e)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::from)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let raw = read(path)?;
    serde_json::from_slice(&raw)
        .with_context(|| format!("{} is not a valid {what}", path.display()))
        .map_err(|e| Failure::new(EXIT_INVALID, e))
}

fn load_weights(path: Option<&PathBuf>) -> Result<WeightSet> {
    match path {
        Some(p) => read_json(p, "weights file"),
        None => Ok(WeightSet::prior()),
    }
}

fn load_journal(path: &Path) -> Result<Journal> {
    let raw = read(path)?;
    parse_journal(&raw).map_err(|e| {
        let code = journal_code(&e);
        Failure::new(code, anyhow!(e).context(format!("journal {}", path.display())))
    })
}

fn json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn emit(out: &mut dyn Write, dest: Option<&Path>, text: &str) -> Result<()> {
    match dest {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn parse_criterion(s: &str) -> Result<Criterion> {
    s.parse::<Criterion>().map_err(|e| Failure::new(EXIT_INVALID, anyhow!("{e}")))
}

pub fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Rubric(RubricCommand::Dump { weights, out: dest }) => {
            let doc = RubricDocument::build(&load_weights(weights.as_ref())?);
            emit(out, dest.as_deref(), &json_string(&doc)?)
        }
        Command::ValidateJournal { path, format } => validate(&path, format, out),
        Command::Score(args) => score(&args, out),
        Command::Weights(cmd) => weights(cmd, out),
        Command::Campaign(cmd) => campaign(cmd, out),
        Command::Report {
            dir,
            format,
            out: dest,
            journal,
        } => report(&dir, format, dest.as_deref(), &journal, out),
        Command::Serve { port, host, data_dir } => serve(host, port, data_dir),
    }
}

fn validate(path: &Path, format: Format, out: &mut dyn Write) -> Result<()> {
    let raw = read(path)?;
    let journal = match parse_journal(&raw) {
        Ok(j) => j,
        Err(e) => {
            if format == Format::Json {
                let (kind, at) = match &e {
                    JournalError::MalformedDocument(_) => ("MalformedDocument", None),
                    JournalError::SchemaViolation { path, .. } => ("SchemaViolation", Some(path.clone())),
                    JournalError::InvariantViolation { path, .. } => ("InvariantViolation", Some(path.clone())),
                    JournalError::UnknownCriterion(_) => ("UnknownCriterion", None),
                };
                let body = serde_json::json!({ "valid": false, "error": kind, "path": at, "message": e.to_string() });
                emit(out, None, &json_string(&body)?)?;
            }
            let code = journal_code(&e);
            return Err(Failure::new(code, anyhow!(e).context(format!("journal {}", path.display()))));
        }
    };
    let report = validate_journal(&journal, &rubric_registry());
    let text = match format {
        Format::Json => json_string(&report)?,
        Format::Text => validation_text(&report),
    };
    emit(out, None, &text)
}

fn list<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn validation_text(r: &ValidationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "entity {}  run {}  entries {}", r.entity_id, r.run_id, r.entry_count);
    let ss = &r.standard_structure;
    let _ = write!(s, "standard structure {}/{}", ss.coverage.present, ss.coverage.total);
    if !ss.missing.is_empty() {
        let _ = write!(s, "  missing: {}", list(&ss.missing));
    }
    s.push('\n');
    for c in &r.criteria {
        let _ = write!(s, "{} {}/{}", c.criterion, c.coverage.present, c.coverage.total);
        if !c.missing.is_empty() {
            let _ = write!(s, "  missing: {}", list(&c.missing));
        }
        s.push('\n');
    }
    for g in &r.gates {
        let _ = writeln!(s, "gate {} {:?} scope {} evidence {}", g.gate_id, g.severity, g.scope, g.evidence_entry);
    }
    for t in &r.ab_tests {
        let _ = writeln!(s, "a/b test {} with {} runs", t.entry_id, t.runs);
    }
    let _ = writeln!(s, "{}", if r.complete { "COMPLETE" } else { "INCOMPLETE" });
    s
}

/// Scores a sheet file, merging gate events from the run's journal.
pub fn score_sheet(sheet: &Path, journal: Option<&Path>, weights: &WeightSet) -> Result<RunResult> {
    let raw = read(sheet)?;
    let doc = parse_sheet_document(&raw).map_err(|e| {
        Failure::new(EXIT_INVALID, anyhow!(e).context(format!("sheet {}", sheet.display())))
    })?;
    let mut gates = doc.gates;
    if let Some(jpath) = journal {
        let j = load_journal(jpath)?;
        if j.entity_id != doc.sheet.entity_id || j.run_id != doc.sheet.run_id {
            return Err(Failure::new(
                EXIT_INVARIANT,
                anyhow!(
                    "journal is for {}/{}, sheet is for {}/{}",
                    j.entity_id,
                    j.run_id,
                    doc.sheet.entity_id,
                    doc.sheet.run_id
                ),
            ));
        }
        for g in &gates {
            if !g.evidence_entry.is_empty() && !j.entries.iter().any(|e| e.entry_id == g.evidence_entry) {
                return Err(Failure::new(
                    EXIT_INVARIANT,
                    anyhow!("gate `{}` cites entry `{}`, not in the journal", g.gate_id, g.evidence_entry),
                ));
            }
        }
        for g in j.gate_events {
            match gates.iter().find(|x| x.gate_id == g.gate_id) {
                Some(x) if x.severity == g.severity && x.scope == g.scope && x.evidence_entry == g.evidence_entry => {}
                Some(_) => {
                    return Err(Failure::new(
                        EXIT_INVARIANT,
                        anyhow!("gate `{}` differs between sheet and journal", g.gate_id),
                    ))
                }
                None => gates.push(g),
            }
        }
    }
    score_run(&doc.sheet, &gates, weights).map_err(|e: ScoringError| Failure::new(EXIT_INVALID, e))
}

fn score(args: &ScoreArgs, out: &mut dyn Write) -> Result<()> {
    let weights = load_weights(args.weights.as_ref())?;
    let run = score_sheet(&args.sheet, args.journal.as_deref(), &weights)?;
    if let Some(j) = &args.journal {
        let report = validate_journal(&load_journal(j)?, &rubric_registry());
        if !report.complete {
            eprintln!("warning: journal {} is INCOMPLETE", j.display());
        }
    }
    let text = match args.format {
        Format::Json => json_string(&run)?,
        Format::Text => run_text(&run),
    };
    emit(out, args.out.as_deref(), &text)
}

fn run_text(run: &RunResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "run {}  evaluator {}  entity {}", run.run_id, run.evaluator_id(), run.entity_id());
    for c in &run.composites {
        let _ = write!(s, "{} {}", c.criterion, c.value);
        if !c.knockout_arenas.is_empty() {
            let _ = write!(s, "  knockout: {}", list(&c.knockout_arenas));
        }
        s.push('\n');
    }
    let capped: Vec<_> = run.sheet.scores().filter(|a| a.capped).map(|a| a.arena).collect();
    if !capped.is_empty() {
        let _ = writeln!(s, "capped: {}", list(&capped));
    }
    let _ = writeln!(s, "run index {} ({})", run.run_gui.round_half_up(2), run.run_gui);
    let _ = write!(s, "verdict {}", run.verdict);
    if let Some(g) = &run.rejected_by {
        let _ = write!(s, " by gate {g}");
    }
    s.push('\n');
    s
}

#[derive(Serialize)]
struct AhpOutput {
    #[serde(flatten)]
    result: AhpResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    hundredths: Option<WeightVector>,
}

fn weights(cmd: WeightsCommand, out: &mut dyn Write) -> Result<()> {
    match cmd {
        WeightsCommand::Ahp {
            matrix,
            criterion,
            format,
        } => {
            let m: PairwiseMatrix = read_json(&matrix, "pairwise matrix")?;
            let result = ahp_weights(&m).map_err(|e| Failure::new(EXIT_INVALID, e))?;
            let mut rounding_error = None;
            let hundredths = match criterion {
                Some(c) => match result.to_weight_vector(parse_criterion(&c)?) {
                    Ok(w) => Some(w),
                    Err(e) => {
                        rounding_error = Some(e);
                        None
                    }
                },
                None => None,
            };
            if !result.acceptable {
                eprintln!("warning: consistency ratio {:.4} is not below 0.10", result.cr);
            }
            let text = match format {
                Format::Json => json_string(&AhpOutput { result, hundredths })?,
                Format::Text => {
                    let mut s = String::new();
                    for (i, w) in result.weights.iter().enumerate() {
                        let _ = writeln!(s, "w{} {w:.6}", i + 1);
                    }
                    let _ = writeln!(s, "lambda_max {:.6}", result.lambda_max);
                    let _ = writeln!(s, "CI {:.6}  CR {:.6}  acceptable {}", result.ci, result.cr, result.acceptable);
                    if let Some(h) = hundredths {
                        let _ = writeln!(s, "{} hundredths {:?}", h.criterion(), h.hundredths());
                    }
                    s
                }
            };
            emit(out, None, &text)?;
            match rounding_error {
                Some(e) => Err(Failure::new(EXIT_INVARIANT, anyhow!(e).context("cannot convert to rubric weights"))),
                None => Ok(()),
            }
        }
        WeightsCommand::Fit {
            data,
            criterion,
            prior,
            format,
        } => {
            let c = parse_criterion(&criterion)?;
            let observations: Vec<CalibrationObservation> = read_json(&data, "calibration file")?;
            let prior = if prior == "default" {
                WeightSet::prior()
            } else {
                load_weights(Some(&PathBuf::from(prior)))?
            };
            let report =
                fit_weights_report(c, &observations, prior.get(c)).map_err(|e| Failure::new(EXIT_INVALID, e))?;
            let text = match format {
                Format::Json => json_string(&report)?,
                Format::Text => format!(
                    "{} weights {:?}  objective {}\nprior {:?}  objective {}\n{} observations, {} candidates\n",
                    c,
                    report.weights.hundredths(),
                    report.objective,
                    report.prior.hundredths(),
                    report.prior_objective,
                    report.observations,
                    report.candidates
                ),
            };
            emit(out, None, &text)
        }
        WeightsCommand::DeriveRi {
            n,
            samples,
            seed,
            format,
        } => {
            let est = derive_random_index(n, samples, seed).map_err(|e| Failure::new(EXIT_INVALID, e))?;
            let text = match format {
                Format::Json => json_string(&est)?,
                Format::Text => {
                    let shipped = random_index(n).map(|r| format!("{r:.4}")).unwrap_or_else(|_| "-".into());
                    format!("n {n}  samples {samples}  seed {seed}\nRI {:.4}  shipped {shipped}\n", est.mean_ci)
                }
            };
            emit(out, None, &text)
        }
    }
}

fn campaign(cmd: CampaignCommand, out: &mut dyn Write) -> Result<()> {
    match cmd {
        CampaignCommand::Init {
            dir,
            entity_id,
            entity_kind,
            campaign_id,
            weights,
        } => {
            let id = match campaign_id {
                Some(id) => id,
                None => dir
                    .file_name()
                    .and_then(|n| n.to_str())
                    .map(str::to_string)
                    .ok_or_else(|| Failure::new(EXIT_INVALID, anyhow!("pass --campaign-id")))?,
            };
            let kind: EntityKind = entity_kind.parse().map_err(|e| Failure::new(EXIT_INVALID, anyhow!("{e}")))?;
            let c = Campaign::new(id, entity_id, kind)
                .map_err(campaign_failure)?
                .with_weights(load_weights(weights.as_ref())?);
            CampaignDir::new(&dir).init(&c).map_err(campaign_failure)?;
            emit(out, None, &format!("initialized campaign {} in {}\n", c.campaign_id, dir.display()))
        }
        CampaignCommand::AddRun {
            dir,
            sheet,
            journal,
            run,
        } => {
            let cdir = CampaignDir::new(&dir);
            let weights = cdir.load().map_err(campaign_failure)?.weights;
            let run = match (sheet, run) {
                (Some(s), _) => score_sheet(&s, journal.as_deref(), &weights)?,
                (None, Some(r)) => read_json(&r, "run result")?,
                (None, None) => return Err(Failure::new(EXIT_INVALID, anyhow!("pass --sheet or --run"))),
            };
            let (run_id, verdict) = (run.run_id.clone(), run.verdict);
            let c = cdir.add_run(run).map_err(campaign_failure)?;
            emit(out, None, &format!("added run {run_id} ({verdict}); {} runs\n", c.runs.len()))
        }
        CampaignCommand::Finalize { dir, weights, format } => {
            let w = weights.map(|p| load_weights(Some(&p))).transpose()?;
            let result = CampaignDir::new(&dir).finalize(w.as_ref()).map_err(campaign_failure)?;
            let text = match format {
                Format::Json => json_string(&result)?,
                Format::Text => result_text(&result),
            };
            emit(out, None, &text)
        }
        CampaignCommand::Show { dir, format } => {
            let c = CampaignDir::new(&dir).load().map_err(campaign_failure)?;
            let summary = c.summary();
            let text = match format {
                Format::Json => json_string(&summary)?,
                Format::Text => {
                    let mut s = format!(
                        "campaign {}  entity {} ({})  status {}\n{} runs; evaluators: {}\n",
                        summary.campaign_id,
                        summary.entity_id,
                        summary.entity_kind,
                        serde_json::to_value(summary.status)?.as_str().unwrap_or_default(),
                        summary.run_count,
                        summary.evaluators.join(", ")
                    );
                    for (a, m) in &summary.arena_means {
                        let _ = writeln!(s, "{a} {}", m.round_half_up(2));
                    }
                    let _ = writeln!(s, "eligible to finalize: {}", summary.eligible_to_finalize);
                    s
                }
            };
            emit(out, None, &text)
        }
    }
}

fn result_text(r: &CampaignResult) -> String {
    let mut s = String::new();
    for (c, v) in &r.final_composites {
        let _ = writeln!(s, "{c} {}", v.round_half_up(2));
    }
    if !r.eliminated_arenas.is_empty() {
        let _ = writeln!(s, "eliminated: {}", list(&r.eliminated_arenas));
    }
    let _ = writeln!(
        s,
        "Grow Up Index {} ({})\nverdict {}  band {}",
        r.grow_up_index.round_half_up(2),
        r.grow_up_index,
        r.verdict,
        r.maturity_band
    );
    s
}

fn report(
    dir: &Path,
    format: ReportFormatArg,
    dest: Option<&Path>,
    journals: &[PathBuf],
    out: &mut dyn Write,
) -> Result<()> {
    let cdir = CampaignDir::new(dir);
    let campaign = cdir.load().map_err(campaign_failure)?;
    let result = cdir.load_result().map_err(campaign_failure)?;
    let coverage = if journals.is_empty() {
        None
    } else {
        let mut merged: Option<Journal> = None;
        for p in journals {
            let j = load_journal(p)?;
            match &mut merged {
                Some(m) => m.entries.extend(j.entries),
                None => merged = Some(j),
            }
        }
        merged.map(|j| coverage_table(&j))
    };
    let format = match format {
        ReportFormatArg::Md => ReportFormat::Markdown,
        ReportFormatArg::Json => ReportFormat::Json,
    };
    let text = render_report(&campaign, &result, coverage.as_ref(), format)
        .map_err(|e| Failure::new(EXIT_NOT_FINALIZED, e))?;
    emit(out, dest, &text)
}

fn serve(host: std::net::IpAddr, port: u16, data_dir: PathBuf) -> Result<()> {
    let _ = tracing_subscriber::fmt().with_writer(std::io::stderr).try_init();
    let rt = tokio::runtime::Runtime::new()?;
    let addr = std::net::SocketAddr::new(host, port);
    eprintln!("serving on http://{addr} (data dir {})", data_dir.display());
    rt.block_on(growai_service::serve(addr, data_dir))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn campaign_errors_map_to_exit_codes() {
        assert_eq!(campaign_failure(CampaignError::NotFinalized).code, EXIT_NOT_FINALIZED);
        assert_eq!(campaign_failure(CampaignError::CampaignFinalized).code, EXIT_INVARIANT);
        assert_eq!(campaign_failure(CampaignError::InvalidId("..".into())).code, EXIT_INVALID);
    }

    #[test]
    fn journal_errors_map_to_exit_codes() {
        let inv = JournalError::InvariantViolation {
            path: "$".into(),
            message: "m".into(),
        };
        assert_eq!(journal_code(&inv), EXIT_INVARIANT);
        assert_eq!(journal_code(&JournalError::MalformedDocument("x".into())), EXIT_INVALID);
    }
}
