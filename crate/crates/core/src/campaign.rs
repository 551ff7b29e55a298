//! Multi-evaluator campaigns: run collection, finalization into the Grow Up
//! Index with verdict and maturity band, and on-disk persistence.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::decimal::{Exact, Tenths};
use crate::rubric::{ArenaId, Criterion, WeightSet};
use crate::scoring::{RunResult, RunVerdict};

/// Runs from distinct evaluators required before finalizing.
pub const MIN_RUNS: usize = 10;

/// Grow Up Index at or above which a campaign passes (2.4).
pub fn pass_threshold() -> Exact {
    Exact::new(12, 5)
}

/// Arena means below this (2.0) eliminate the entity.
pub fn arena_floor() -> Exact {
    Exact::from_tenths(Tenths::FLOOR)
}

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error("campaign is finalized")]
    CampaignFinalized,
    #[error("campaign is not finalized")]
    NotFinalized,
    #[error("evaluator `{0}` already submitted a run")]
    DuplicateEvaluator(String),
    #[error("run `{0}` already exists")]
    DuplicateRun(String),
    #[error("run is for entity `{found}`, campaign evaluates `{expected}`")]
    EntityMismatch { expected: String, found: String },
    #[error("{have} runs, at least {need} required")]
    InsufficientRuns { have: usize, need: usize },
    #[error("Grow Up Index {0} outside [1, 3]")]
    OutOfRange(Exact),
    #[error("`{0}` is not a valid identifier (use letters, digits, '.', '_' or '-')")]
    InvalidId(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Robot,
    SoftwareAgent,
    Llm,
    Humanoid,
    Other,
}

impl std::str::FromStr for EntityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| format!("unknown entity kind `{s}`"))
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntityKind::Robot => "robot",
            EntityKind::SoftwareAgent => "software_agent",
            EntityKind::Llm => "llm",
            EntityKind::Humanoid => "humanoid",
            EntityKind::Other => "other",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CampaignStatus {
    Open,
    Finalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CampaignVerdict {
    Passed,
    FailedThreshold,
    FailedElimination,
    Rejected,
}

impl fmt::Display for CampaignVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CampaignVerdict::Passed => "PASSED",
            CampaignVerdict::FailedThreshold => "FAILED_THRESHOLD",
            CampaignVerdict::FailedElimination => "FAILED_ELIMINATION",
            CampaignVerdict::Rejected => "REJECTED",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MaturityBand {
    Nascent,
    Developing,
    GrownUp,
    AutonomousWise,
}

impl fmt::Display for MaturityBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MaturityBand::Nascent => "NASCENT",
            MaturityBand::Developing => "DEVELOPING",
            MaturityBand::GrownUp => "GROWN_UP",
            MaturityBand::AutonomousWise => "AUTONOMOUS_WISE",
        })
    }
}

/// Lower bounds of the three upper bands. Each band is half-open on the
/// right except the last, which includes 3.0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandCuts {
    pub developing: Exact,
    pub grown_up: Exact,
    pub autonomous_wise: Exact,
}

impl Default for BandCuts {
    fn default() -> Self {
        BandCuts {
            developing: Exact::new(2, 1),
            grown_up: pass_threshold(),
            autonomous_wise: Exact::new(14, 5),
        }
    }
}

pub fn maturity_band(gui: Exact) -> Result<MaturityBand, CampaignError> {
    maturity_band_with(gui, &BandCuts::default())
}

pub fn maturity_band_with(gui: Exact, cuts: &BandCuts) -> Result<MaturityBand, CampaignError> {
    if gui < Exact::from_integer(1) || gui > Exact::from_integer(3) {
        return Err(CampaignError::OutOfRange(gui));
    }
    Ok(if gui >= cuts.autonomous_wise {
        MaturityBand::AutonomousWise
    } else if gui >= cuts.grown_up {
        MaturityBand::GrownUp
    } else if gui >= cuts.developing {
        MaturityBand::Developing
    } else {
        MaturityBand::Nascent
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Campaign {
    pub campaign_id: String,
    pub entity_id: String,
    pub entity_kind: EntityKind,
    pub status: CampaignStatus,
    /// Weights applied at finalization unless overridden.
    #[serde(default)]
    pub weights: WeightSet,
    #[serde(default)]
    pub runs: Vec<RunResult>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub campaign_id: String,
    pub entity_id: String,
    pub entity_kind: EntityKind,
    pub run_count: usize,
    pub weights: WeightSet,
    pub final_arena_means: BTreeMap<ArenaId, Exact>,
    pub final_composites: BTreeMap<Criterion, Exact>,
    pub grow_up_index: Exact,
    pub eliminated_arenas: Vec<ArenaId>,
    pub verdict: CampaignVerdict,
    pub maturity_band: MaturityBand,
    /// Runs whose own verdict was REJECTED.
    pub rejected_runs: Vec<String>,
    /// Runs with a per-run knockout; diagnostic only.
    pub knockout_runs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub campaign_id: String,
    pub entity_id: String,
    pub entity_kind: EntityKind,
    pub status: CampaignStatus,
    pub run_count: usize,
    pub evaluators: Vec<String>,
    pub arena_means: BTreeMap<ArenaId, Exact>,
    pub eligible_to_finalize: bool,
}

impl Campaign {
    pub fn new(
        campaign_id: impl Into<String>,
        entity_id: impl Into<String>,
        entity_kind: EntityKind,
    ) -> Result<Self, CampaignError> {
        let campaign_id = campaign_id.into();
        check_id(&campaign_id)?;
        Ok(Campaign {
            campaign_id,
            entity_id: entity_id.into(),
            entity_kind,
            status: CampaignStatus::Open,
            weights: WeightSet::prior(),
            runs: Vec::new(),
        })
    }

    pub fn with_weights(mut self, weights: WeightSet) -> Self {
        self.weights = weights;
        self
    }

    pub fn has_evaluator(&self, evaluator_id: &str) -> bool {
        self.runs.iter().any(|r| r.evaluator_id() == evaluator_id)
    }

    /// Checks that `run` could be appended, without appending it.
    pub fn check_run(&self, run: &RunResult) -> Result<(), CampaignError> {
        if self.status == CampaignStatus::Finalized {
            return Err(CampaignError::CampaignFinalized);
        }
        if run.entity_id() != self.entity_id {
            return Err(CampaignError::EntityMismatch {
                expected: self.entity_id.clone(),
                found: run.entity_id().to_string(),
            });
        }
        check_id(&run.run_id)?;
        if self.has_evaluator(run.evaluator_id()) {
            return Err(CampaignError::DuplicateEvaluator(run.evaluator_id().to_string()));
        }
        if self.runs.iter().any(|r| r.run_id == run.run_id) {
            return Err(CampaignError::DuplicateRun(run.run_id.clone()));
        }
        Ok(())
    }

    pub fn add_run(&mut self, run: RunResult) -> Result<(), CampaignError> {
        self.check_run(&run)?;
        self.runs.push(run);
        Ok(())
    }

    /// Computes the result and moves the campaign to FINALIZED. A second
    /// call fails with `CampaignFinalized`.
    pub fn finalize(&mut self, weights: Option<&WeightSet>) -> Result<CampaignResult, CampaignError> {
        if self.status == CampaignStatus::Finalized {
            return Err(CampaignError::CampaignFinalized);
        }
        if let Some(w) = weights {
            self.weights = w.clone();
        }
        let result = finalize_campaign(self, &self.weights)?;
        self.status = CampaignStatus::Finalized;
        Ok(result)
    }

    pub fn summary(&self) -> CampaignSummary {
        CampaignSummary {
            campaign_id: self.campaign_id.clone(),
            entity_id: self.entity_id.clone(),
            entity_kind: self.entity_kind,
            status: self.status,
            run_count: self.runs.len(),
            evaluators: self.runs.iter().map(|r| r.evaluator_id().to_string()).collect(),
            arena_means: arena_means(&self.runs),
            eligible_to_finalize: self.status == CampaignStatus::Open && self.runs.len() >= MIN_RUNS,
        }
    }
}

/// Campaign and run ids double as file names.
pub fn check_id(id: &str) -> Result<(), CampaignError> {
    let ok = !id.is_empty()
        && id.len() <= 128
        && !id.starts_with('.')
        && id.bytes().all(|b| b.is_ascii_alphanumeric() || b"._-".contains(&b));
    if ok {
        Ok(())
    } else {
        Err(CampaignError::InvalidId(id.to_string()))
    }
}

/// Exact per-arena mean of post-gating scores; empty when there are no runs.
pub fn arena_means(runs: &[RunResult]) -> BTreeMap<ArenaId, Exact> {
    if runs.is_empty() {
        return BTreeMap::new();
    }
    let n = runs.len() as i64;
    ArenaId::all()
        .map(|arena| {
            let sum: i64 = runs.iter().map(|r| i64::from(r.sheet.value(arena).get())).sum();
            (arena, Exact::new(sum, 10 * n))
        })
        .collect()
}

/// Weighted composite of arena means for one criterion.
pub fn composite_of_means(criterion: Criterion, means: &BTreeMap<ArenaId, Exact>, weights: &WeightSet) -> Exact {
    let w = weights.get(criterion).hundredths();
    criterion
        .arenas()
        .iter()
        .zip(w)
        .map(|(a, w)| Exact(means[a].0 * num_rational::Ratio::new(i64::from(w), 100)))
        .sum()
}

/// Pure aggregation of a campaign's runs. Does not change the campaign.
pub fn finalize_campaign(campaign: &Campaign, weights: &WeightSet) -> Result<CampaignResult, CampaignError> {
    let runs = &campaign.runs;
    if runs.len() < MIN_RUNS {
        return Err(CampaignError::InsufficientRuns {
            have: runs.len(),
            need: MIN_RUNS,
        });
    }
    let means = arena_means(runs);
    let composites: BTreeMap<_, _> = Criterion::ALL
        .into_iter()
        .map(|c| (c, composite_of_means(c, &means, weights)))
        .collect();
    let gui = Exact(composites.values().map(|c| c.0).sum::<num_rational::Ratio<i64>>() / 6);
    let floor = arena_floor();
    let eliminated: Vec<_> = means.iter().filter(|(_, m)| **m < floor).map(|(a, _)| *a).collect();
    let rejected_runs: Vec<_> = runs
        .iter()
        .filter(|r| r.verdict == RunVerdict::Rejected)
        .map(|r| r.run_id.clone())
        .collect();
    let knockout_runs = runs
        .iter()
        .filter(|r| r.verdict == RunVerdict::Knockout)
        .map(|r| r.run_id.clone())
        .collect();
    let verdict = if !rejected_runs.is_empty() {
        CampaignVerdict::Rejected
    } else if !eliminated.is_empty() {
        CampaignVerdict::FailedElimination
    } else if gui >= pass_threshold() {
        CampaignVerdict::Passed
    } else {
        CampaignVerdict::FailedThreshold
    };
    Ok(CampaignResult {
        campaign_id: campaign.campaign_id.clone(),
        entity_id: campaign.entity_id.clone(),
        entity_kind: campaign.entity_kind,
        run_count: runs.len(),
        weights: weights.clone(),
        final_arena_means: means,
        final_composites: composites,
        grow_up_index: gui,
        eliminated_arenas: eliminated,
        verdict,
        maturity_band: maturity_band(gui)?,
        rejected_runs,
        knockout_runs,
    })
}

/// Manifest stored as `campaign.json`; run bodies live under `runs/`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Manifest {
    campaign_id: String,
    entity_id: String,
    entity_kind: EntityKind,
    status: CampaignStatus,
    weights: WeightSet,
    run_ids: Vec<String>,
}

/// A campaign directory: `campaign.json`, `runs/<run_id>.json` and, once
/// finalized, `result.json`. Runs are append-only.
#[derive(Debug, Clone)]
pub struct CampaignDir {
    root: PathBuf,
}

impl CampaignDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        CampaignDir { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn manifest_path(&self) -> PathBuf {
        self.root.join("campaign.json")
    }

    fn run_path(&self, run_id: &str) -> PathBuf {
        self.root.join("runs").join(format!("{run_id}.json"))
    }

    pub fn result_path(&self) -> PathBuf {
        self.root.join("result.json")
    }

    pub fn exists(&self) -> bool {
        self.manifest_path().is_file()
    }

    /// Creates the directory layout for a new, empty campaign.
    pub fn init(&self, campaign: &Campaign) -> Result<(), CampaignError> {
        if self.exists() {
            return Err(CampaignError::Io {
                path: self.manifest_path(),
                source: io::Error::new(io::ErrorKind::AlreadyExists, "campaign already initialized"),
            });
        }
        let runs = self.root.join("runs");
        fs::create_dir_all(&runs).map_err(|source| CampaignError::Io { path: runs, source })?;
        for run in &campaign.runs {
            write_json(&self.run_path(&run.run_id), run)?;
        }
        self.write_manifest(campaign)
    }

    fn write_manifest(&self, campaign: &Campaign) -> Result<(), CampaignError> {
        let manifest = Manifest {
            campaign_id: campaign.campaign_id.clone(),
            entity_id: campaign.entity_id.clone(),
            entity_kind: campaign.entity_kind,
            status: campaign.status,
            weights: campaign.weights.clone(),
            run_ids: campaign.runs.iter().map(|r| r.run_id.clone()).collect(),
        };
        write_json(&self.manifest_path(), &manifest)
    }

    pub fn load(&self) -> Result<Campaign, CampaignError> {
        let manifest: Manifest = read_json(&self.manifest_path())?;
        let runs = manifest
            .run_ids
            .iter()
            .map(|id| read_json::<RunResult>(&self.run_path(id)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut seen = HashSet::new();
        for r in &runs {
            if !seen.insert(r.evaluator_id().to_string()) {
                return Err(CampaignError::DuplicateEvaluator(r.evaluator_id().to_string()));
            }
        }
        Ok(Campaign {
            campaign_id: manifest.campaign_id,
            entity_id: manifest.entity_id,
            entity_kind: manifest.entity_kind,
            status: manifest.status,
            weights: manifest.weights,
            runs,
        })
    }

    /// Appends a run. The run file is written before the manifest that
    /// references it.
    pub fn add_run(&self, run: RunResult) -> Result<Campaign, CampaignError> {
        let mut campaign = self.load()?;
        campaign.check_run(&run)?;
        let path = self.run_path(&run.run_id);
        if path.exists() {
            return Err(CampaignError::DuplicateRun(run.run_id.clone()));
        }
        write_json(&path, &run)?;
        campaign.add_run(run)?;
        self.write_manifest(&campaign)?;
        Ok(campaign)
    }

    pub fn finalize(&self, weights: Option<&WeightSet>) -> Result<CampaignResult, CampaignError> {
        let mut campaign = self.load()?;
        let result = campaign.finalize(weights)?;
        write_json(&self.result_path(), &result)?;
        self.write_manifest(&campaign)?;
        Ok(result)
    }

    pub fn load_result(&self) -> Result<CampaignResult, CampaignError> {
        let campaign = self.load()?;
        if campaign.status != CampaignStatus::Finalized {
            return Err(CampaignError::NotFinalized);
        }
        read_json(&self.result_path())
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CampaignError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|source| CampaignError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    bytes.push(b'\n');
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, &bytes)
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(|source| CampaignError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CampaignError> {
    let bytes = fs::read(path).map_err(|source| CampaignError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_slice(&bytes).map_err(|source| CampaignError::Json {
        path: path.to_path_buf(),
        source,
    })
}
