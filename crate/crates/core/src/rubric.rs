//! The GROW-AI rubric: six criteria, their games, 24 arenas, prior-expert
//! weights and the journal evidence each criterion expects.
//!
//! Everything here is constant data. [`rubric_registry`] and
//! [`default_weights`] always return the same values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::journal::EvidenceCategory;

/// Version tag of the exported rubric document.
pub const RUBRIC_SCHEMA_VERSION: &str = "growai-rubric/1";

/// Lowest and highest admissible weight, in hundredths.
pub const WEIGHT_MIN: u8 = 15;
pub const WEIGHT_MAX: u8 = 35;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RubricError {
    #[error("unknown criterion `{0}` (expected C1..C6)")]
    UnknownCriterion(String),
    #[error("unknown arena `{0}`")]
    UnknownArena(String),
    #[error("weights for {criterion} must sum to 100 hundredths, got {sum}")]
    WeightSum { criterion: Criterion, sum: u32 },
    #[error("weight {value} for {arena} lies outside [{WEIGHT_MIN}, {WEIGHT_MAX}] hundredths")]
    WeightOutOfBox { arena: ArenaId, value: u8 },
}

/// One of the six evaluated capability areas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
}

impl Criterion {
    pub const ALL: [Criterion; 6] = [
        Criterion::C1,
        Criterion::C2,
        Criterion::C3,
        Criterion::C4,
        Criterion::C5,
        Criterion::C6,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn id(self) -> &'static str {
        ["C1", "C2", "C3", "C4", "C5", "C6"][self.index()]
    }

    pub fn title(self) -> &'static str {
        match self {
            Criterion::C1 => "Autonomous Physical and Intellectual Growth",
            Criterion::C2 => "Understanding and Controlling Entropy and Gravity",
            Criterion::C3 => "Efficient Software Algorithms",
            Criterion::C4 => "Sensory and Affective Logic",
            Criterion::C5 => "Self-evaluation",
            Criterion::C6 => "Advanced Autonomous Wisdom",
        }
    }

    pub fn game_name(self) -> &'static str {
        match self {
            Criterion::C1 => "Development Ladder (10 Levels)",
            Criterion::C2 => "The Master of Entropy at 1g",
            Criterion::C3 => "Algorithmic Sprint",
            Criterion::C4 => "The Empathy Compass",
            Criterion::C5 => "Your Own Judge",
            Criterion::C6 => "The Compass of Wisdom",
        }
    }

    /// The four arenas of this criterion's game, in weight order.
    pub fn arenas(self) -> [ArenaId; 4] {
        [0, 1, 2, 3].map(|slot| ArenaId { criterion: self, slot })
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Criterion {
    type Err = RubricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| RubricError::UnknownCriterion(s.to_string()))
    }
}

impl Serialize for Criterion {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.id())
    }
}

impl<'de> Deserialize<'de> for Criterion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// code, descriptive name
const ARENA_TABLE: [[(&str, &str); 4]; 6] = [
    [
        ("GR", "Progressive physical and/or virtual growth"),
        ("AD", "Adaptability without forgetting"),
        ("IN", "Integrate embodied software"),
        ("SD", "Self-direction"),
    ],
    [
        ("GRV", "Stability at 1g with perturbations"),
        ("ENP", "Physical/energy entropy management"),
        ("ENI", "Informational robustness"),
        ("MIX", "Performance/consumption co-optimization"),
    ],
    [
        ("PT", "Technical performance"),
        ("ROB", "Robustness and resilience"),
        ("INT", "Multimodal integration"),
        ("ETH", "Ethics and transparency in decisions"),
    ],
    [
        ("DET", "Emotion detection"),
        ("RESP", "Contextually appropriate affective response"),
        ("IRT", "Real-time multimodal integration"),
        ("ERA", "Ethical reaction to affective states"),
    ],
    [
        ("RTM", "Real-time monitoring"),
        ("PFA", "Post-factum analysis"),
        ("ALT", "Alternative strategies"),
        ("IMP", "Implementation and re-evaluation"),
    ],
    [
        ("CED", "Contextual ethical reasoning"),
        ("LTP", "Long-term planning"),
        ("LFE", "Learning from experience"),
        ("CPS", "Creative problem solving"),
    ],
];

/// One of the 24 arenas. Displayed and serialized as its label, e.g. `A2.AD`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArenaId {
    criterion: Criterion,
    slot: u8,
}

impl ArenaId {
    pub fn new(criterion: Criterion, slot: usize) -> Option<Self> {
        (slot < 4).then_some(ArenaId {
            criterion,
            slot: slot as u8,
        })
    }

    /// All 24 arenas, criterion-major.
    pub fn all() -> impl Iterator<Item = ArenaId> {
        Criterion::ALL.into_iter().flat_map(Criterion::arenas)
    }

    pub fn criterion(self) -> Criterion {
        self.criterion
    }

    /// Position within the criterion's game (0-based).
    pub fn slot(self) -> usize {
        self.slot as usize
    }

    pub fn code(self) -> &'static str {
        ARENA_TABLE[self.criterion.index()][self.slot()].0
    }

    pub fn name(self) -> &'static str {
        ARENA_TABLE[self.criterion.index()][self.slot()].1
    }

    pub fn label(self) -> String {
        format!("A{}.{}", self.slot + 1, self.code())
    }

    /// Accepts a full label (`A2.AD`) or a bare code (`AD`); codes are unique
    /// across the whole rubric.
    pub fn parse(s: &str) -> Result<Self, RubricError> {
        let s = s.trim();
        let (slot_hint, code) = match s.split_once('.') {
            Some((prefix, code)) => {
                let slot = prefix
                    .strip_prefix('A')
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|d| (1..=4).contains(d))
                    .ok_or_else(|| RubricError::UnknownArena(s.to_string()))?;
                (Some(slot - 1), code)
            }
            None => (None, s),
        };
        ArenaId::all()
            .find(|a| a.code() == code && slot_hint.is_none_or(|slot| slot == a.slot()))
            .ok_or_else(|| RubricError::UnknownArena(s.to_string()))
    }
}

impl fmt::Display for ArenaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}.{}", self.slot + 1, self.code())
    }
}

impl FromStr for ArenaId {
    type Err = RubricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ArenaId::parse(s)
    }
}

impl Serialize for ArenaId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ArenaId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Four arena weights of one criterion, in hundredths.
///
/// Construction enforces the simplex (sum exactly 100) and the
/// `[15, 35]` box on every component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct WeightVector {
    criterion: Criterion,
    weights: [u8; 4],
}

impl WeightVector {
    pub fn new(criterion: Criterion, weights: [u8; 4]) -> Result<Self, RubricError> {
        for (arena, &w) in criterion.arenas().iter().zip(&weights) {
            if !(WEIGHT_MIN..=WEIGHT_MAX).contains(&w) {
                return Err(RubricError::WeightOutOfBox { arena: *arena, value: w });
            }
        }
        let sum: u32 = weights.iter().map(|&w| u32::from(w)).sum();
        if sum != 100 {
            return Err(RubricError::WeightSum { criterion, sum });
        }
        Ok(WeightVector { criterion, weights })
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }

    pub fn hundredths(&self) -> [u8; 4] {
        self.weights
    }

    pub fn get(&self, arena: ArenaId) -> Option<u8> {
        (arena.criterion() == self.criterion).then(|| self.weights[arena.slot()])
    }
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            criterion: Criterion,
            weights: [u8; 4],
        }
        let raw = Raw::deserialize(deserializer)?;
        WeightVector::new(raw.criterion, raw.weights).map_err(serde::de::Error::custom)
    }
}

/// Prior-expert weights, arena order as in each criterion's composite formula.
pub fn default_weights(criterion: Criterion) -> WeightVector {
    let weights = match criterion {
        Criterion::C1 => [25, 30, 25, 20],
        Criterion::C2 => [30, 25, 20, 25],
        Criterion::C3 => [35, 25, 20, 20],
        Criterion::C4 => [30, 25, 25, 20],
        Criterion::C5 => [30, 25, 20, 25],
        Criterion::C6 => [30, 25, 25, 20],
    };
    WeightVector { criterion, weights }
}

/// A complete weight assignment for all six criteria.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSet([WeightVector; 6]);

impl WeightSet {
    pub fn prior() -> Self {
        WeightSet(Criterion::ALL.map(default_weights))
    }

    pub fn get(&self, criterion: Criterion) -> &WeightVector {
        &self.0[criterion.index()]
    }

    /// Replaces the weights of `weights.criterion()`.
    pub fn set(&mut self, weights: WeightVector) {
        self.0[weights.criterion().index()] = weights;
    }

    pub fn iter(&self) -> impl Iterator<Item = &WeightVector> {
        self.0.iter()
    }
}

impl Default for WeightSet {
    fn default() -> Self {
        WeightSet::prior()
    }
}

// On disk: {"C1": [25, 30, 25, 20], ...}. Missing criteria fall back to the prior.
impl Serialize for WeightSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(6))?;
        for w in &self.0 {
            map.serialize_entry(w.criterion.id(), &w.weights)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for WeightSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = std::collections::BTreeMap::<Criterion, [u8; 4]>::deserialize(deserializer)?;
        let mut set = WeightSet::prior();
        for (criterion, weights) in raw {
            set.set(WeightVector::new(criterion, weights).map_err(serde::de::Error::custom)?);
        }
        Ok(set)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    pub criterion: Criterion,
    pub game_name: &'static str,
    pub arenas: [ArenaId; 4],
    pub evidence_checklist: &'static [EvidenceCategory],
}

/// The six games in criterion order.
pub fn rubric_registry() -> Vec<GameSpec> {
    Criterion::ALL
        .into_iter()
        .map(|criterion| GameSpec {
            criterion,
            game_name: criterion.game_name(),
            arenas: criterion.arenas(),
            evidence_checklist: EvidenceCategory::checklist(criterion),
        })
        .collect()
}

/// Serializable rubric, the payload of `growai rubric dump` and `GET /rubric`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RubricDocument {
    pub schema_version: String,
    pub scale: ScaleDoc,
    pub thresholds: ThresholdDoc,
    pub standard_structure: Vec<EvidenceCategory>,
    pub games: Vec<GameDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleDoc {
    pub min: String,
    pub max: String,
    pub step: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdDoc {
    pub pass_index: String,
    pub arena_floor: String,
    pub gate_cap: String,
    pub min_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameDoc {
    pub criterion: Criterion,
    pub title: String,
    pub game_name: String,
    pub arenas: Vec<ArenaDoc>,
    pub evidence_checklist: Vec<EvidenceCategory>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArenaDoc {
    pub label: String,
    pub code: String,
    pub name: String,
    pub weight_hundredths: u8,
    pub weight: String,
}

impl RubricDocument {
    pub fn build(weights: &WeightSet) -> Self {
        let games = rubric_registry()
            .into_iter()
            .map(|game| {
                let wv = weights.get(game.criterion);
                GameDoc {
                    criterion: game.criterion,
                    title: game.criterion.title().to_string(),
                    game_name: game.game_name.to_string(),
                    arenas: game
                        .arenas
                        .iter()
                        .map(|&a| {
                            let w = wv.hundredths()[a.slot()];
                            ArenaDoc {
                                label: a.label(),
                                code: a.code().to_string(),
                                name: a.name().to_string(),
                                weight_hundredths: w,
                                weight: format!("0.{w:02}"),
                            }
                        })
                        .collect(),
                    evidence_checklist: game.evidence_checklist.to_vec(),
                }
            })
            .collect();
        RubricDocument {
            schema_version: RUBRIC_SCHEMA_VERSION.to_string(),
            scale: ScaleDoc {
                min: "1.0".into(),
                max: "3.0".into(),
                step: "0.1".into(),
            },
            thresholds: ThresholdDoc {
                pass_index: "2.4".into(),
                arena_floor: "2.0".into(),
                gate_cap: "2.0".into(),
                min_runs: crate::campaign::MIN_RUNS,
            },
            standard_structure: EvidenceCategory::STANDARD.to_vec(),
            games,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn prior_weights_match_composite_formulas() {
        assert_eq!(default_weights(Criterion::C1).hundredths(), [25, 30, 25, 20]);
        assert_eq!(default_weights(Criterion::C2).hundredths(), [30, 25, 20, 25]);
        assert_eq!(default_weights(Criterion::C3).hundredths(), [35, 25, 20, 20]);
        assert_eq!(default_weights(Criterion::C4).hundredths(), [30, 25, 25, 20]);
        assert_eq!(default_weights(Criterion::C5).hundredths(), [30, 25, 20, 25]);
        assert_eq!(default_weights(Criterion::C6).hundredths(), [30, 25, 25, 20]);
        for c in Criterion::ALL {
            let w = default_weights(c);
            assert_eq!(WeightVector::new(c, w.hundredths()), Ok(w));
        }
    }

    #[test]
    fn registry_is_complete() {
        let reg = rubric_registry();
        assert_eq!(reg.len(), 6);
        let codes: Vec<_> = reg[1].arenas.iter().map(|a| a.code()).collect();
        assert_eq!(codes, ["GRV", "ENP", "ENI", "MIX"]);
        assert_eq!(reg[4].game_name, "Your Own Judge");
        let all: HashSet<_> = reg.iter().flat_map(|g| g.arenas).collect();
        assert_eq!(all.len(), 24);
        assert_eq!(reg, rubric_registry());
    }

    #[test]
    fn arena_labels_round_trip() {
        for a in ArenaId::all() {
            assert_eq!(a.label().parse::<ArenaId>().unwrap(), a);
            assert_eq!(a.code().parse::<ArenaId>().unwrap(), a);
        }
        assert_eq!(ArenaId::parse("A2.AD").unwrap().criterion(), Criterion::C1);
        assert!(ArenaId::parse("A3.AD").is_err());
        assert!(ArenaId::parse("A5.GR").is_err());
        assert!(ArenaId::parse("XYZ").is_err());
    }

    #[test]
    fn weight_vector_rejects_bad_input() {
        assert!(matches!(
            WeightVector::new(Criterion::C1, [25, 25, 25, 24]),
            Err(RubricError::WeightSum { sum: 99, .. })
        ));
        assert!(matches!(
            WeightVector::new(Criterion::C1, [40, 20, 20, 20]),
            Err(RubricError::WeightOutOfBox { value: 40, .. })
        ));
    }

    #[test]
    fn weight_set_json_fills_missing_with_prior() {
        let set: WeightSet = serde_json::from_str(r#"{"C2": [25, 25, 25, 25]}"#).unwrap();
        assert_eq!(set.get(Criterion::C2).hundredths(), [25; 4]);
        assert_eq!(set.get(Criterion::C1), &default_weights(Criterion::C1));
        assert!(serde_json::from_str::<WeightSet>(r#"{"C2": [50, 20, 15, 15]}"#).is_err());
    }

    #[test]
    fn document_carries_weights() {
        let doc = RubricDocument::build(&WeightSet::prior());
        assert_eq!(doc.games[2].arenas[0].weight, "0.35");
        assert_eq!(doc.games[2].game_name, "Algorithmic Sprint");
        let arenas: usize = doc.games.iter().map(|g| g.arenas.len()).sum();
        assert_eq!(arenas, 24);
    }
}
