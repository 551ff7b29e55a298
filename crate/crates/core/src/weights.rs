//! Weight calibration: AHP eigenvector weights with consistency checking,
//! the random index table, least-squares fitting on the integer-hundredths
//! simplex, and largest-remainder normalisation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize};

use crate::decimal::{parse_decimal, Tenths, Thousandths};
use crate::rubric::{Criterion, WeightVector, WEIGHT_MAX, WEIGHT_MIN};

pub const RECIPROCITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalibrationError {
    #[error("unsupported matrix dimension {0}")]
    UnsupportedDimension(usize),
    #[error("matrix must be {n}x{n}")]
    ShapeMismatch { n: usize },
    #[error("cell ({row}, {col}) must be a positive finite number")]
    NonPositiveEntry { row: usize, col: usize },
    #[error("cells ({row}, {col}) and ({col}, {row}) are not reciprocal")]
    NotReciprocal { row: usize, col: usize },
    #[error("power iteration did not converge in {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("no calibration observations")]
    EmptyObservations,
    #[error("observation {index} is for {found}, expected {expected}")]
    CriterionMismatch {
        index: usize,
        expected: Criterion,
        found: Criterion,
    },
    #[error("observation {index}: target {target} outside 1.000..3.000")]
    TargetOutOfRange { index: usize, target: Thousandths },
    #[error("rounded weight {value} at position {index} falls outside [{WEIGHT_MIN}, {WEIGHT_MAX}]")]
    BoxViolation { index: usize, value: u32 },
    #[error("invalid cell `{0}`")]
    InvalidCell(String),
}

/// Positive reciprocal pairwise comparison matrix, dimension 2..=10.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseMatrix {
    n: usize,
    cells: Vec<Vec<f64>>,
}

impl PairwiseMatrix {
    pub fn new(cells: Vec<Vec<f64>>) -> Result<Self, CalibrationError> {
        let n = cells.len();
        if !(2..=10).contains(&n) {
            return Err(CalibrationError::UnsupportedDimension(n));
        }
        if cells.iter().any(|row| row.len() != n) {
            return Err(CalibrationError::ShapeMismatch { n });
        }
        for (row, r) in cells.iter().enumerate() {
            for (col, &v) in r.iter().enumerate() {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CalibrationError::NonPositiveEntry { row, col });
                }
            }
        }
        for i in 0..n {
            if (cells[i][i] - 1.0).abs() > RECIPROCITY_TOLERANCE {
                return Err(CalibrationError::NotReciprocal { row: i, col: i });
            }
            for j in i + 1..n {
                if (cells[i][j] * cells[j][i] - 1.0).abs() > RECIPROCITY_TOLERANCE {
                    return Err(CalibrationError::NotReciprocal { row: i, col: j });
                }
            }
        }
        Ok(PairwiseMatrix { n, cells })
    }

    /// Builds the reciprocal matrix from its strict upper triangle.
    pub fn from_upper(n: usize, upper: impl IntoIterator<Item = f64>) -> Result<Self, CalibrationError> {
        let mut cells = vec![vec![1.0; n]; n];
        let mut it = upper.into_iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = it.next().ok_or(CalibrationError::ShapeMismatch { n })?;
                cells[i][j] = v;
                cells[j][i] = 1.0 / v;
            }
        }
        PairwiseMatrix::new(cells)
    }

    /// Perfectly consistent matrix `a_ij = w_i / w_j`.
    pub fn consistent(weights: &[f64]) -> Result<Self, CalibrationError> {
        let cells = weights
            .iter()
            .map(|wi| weights.iter().map(|wj| wi / wj).collect())
            .collect();
        PairwiseMatrix::new(cells)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[Vec<f64>] {
        &self.cells
    }

    /// Simultaneous row and column permutation: new index `k` takes old
    /// index `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, CalibrationError> {
        let cells = perm
            .iter()
            .map(|&i| perm.iter().map(|&j| self.cells[i][j]).collect())
            .collect();
        PairwiseMatrix::new(cells)
    }

    fn mul(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.cells) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

// Cells may be numbers or text such as "1/3" or "0.25".
impl<'de> Deserialize<'de> for PairwiseMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Cell {
            Number(f64),
            Text(String),
        }
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            cells: Vec<Vec<Cell>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let cells = raw
            .cells
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|c| match c {
                        Cell::Number(v) => Ok(v),
                        Cell::Text(s) => parse_cell(&s),
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        if cells.len() != raw.n {
            return Err(serde::de::Error::custom(CalibrationError::ShapeMismatch { n: raw.n }));
        }
        PairwiseMatrix::new(cells).map_err(serde::de::Error::custom)
    }
}

fn parse_cell(s: &str) -> Result<f64, CalibrationError> {
    let dec = |t: &str| parse_decimal(t).map(|(n, d)| n as f64 / d as f64);
    match s.split_once('/') {
        Some((n, d)) => dec(n).zip(dec(d)).map(|(n, d)| n / d),
        None => dec(s),
    }
    .ok_or_else(|| CalibrationError::InvalidCell(s.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AhpConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub cr_threshold: f64,
}

impl Default for AhpConfig {
    fn default() -> Self {
        AhpConfig {
            tolerance: 1e-10,
            max_iterations: 10_000,
            cr_threshold: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AhpResult {
    /// Principal right eigenvector normalized to sum 1.
    pub weights: Vec<f64>,
    pub lambda_max: f64,
    pub ci: f64,
    pub cr: f64,
    pub acceptable: bool,
    pub iterations: usize,
}

impl AhpResult {
    /// Rounds the eigenvector to hundredths for use as criterion weights.
    pub fn to_weight_vector(&self, criterion: Criterion) -> Result<WeightVector, CalibrationError> {
        normalize_weights(criterion, &self.weights)
    }
}

pub fn ahp_weights(matrix: &PairwiseMatrix) -> Result<AhpResult, CalibrationError> {
    ahp_weights_with(matrix, &AhpConfig::default())
}

pub fn ahp_weights_with(matrix: &PairwiseMatrix, config: &AhpConfig) -> Result<AhpResult, CalibrationError> {
    let n = matrix.n;
    let (weights, iterations) = principal_eigenvector(matrix, config)?;
    let mut ax = vec![0.0; n];
    matrix.mul(&weights, &mut ax);
    let rayleigh = dot(&weights, &ax) / dot(&weights, &weights);
    // Perron root of a positive reciprocal matrix is at least n; anything
    // below is rounding noise.
    let lambda_max = rayleigh.max(n as f64);
    let ci = (lambda_max - n as f64) / (n as f64 - 1.0);
    let cr = if n >= 3 { ci / random_index(n)? } else { 0.0 };
    Ok(AhpResult {
        weights,
        lambda_max,
        ci,
        cr,
        acceptable: cr < config.cr_threshold,
        iterations,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn principal_eigenvector(
    matrix: &PairwiseMatrix,
    config: &AhpConfig,
) -> Result<(Vec<f64>, usize), CalibrationError> {
    let n = matrix.n;
    let mut x = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    for iteration in 1..=config.max_iterations {
        matrix.mul(&x, &mut y);
        let sum: f64 = y.iter().sum();
        let mut delta = 0.0f64;
        for (xi, yi) in x.iter_mut().zip(&y) {
            let next = yi / sum;
            delta = delta.max((next - *xi).abs());
            *xi = next;
        }
        if delta < config.tolerance {
            return Ok((x, iteration));
        }
    }
    Err(CalibrationError::NoConvergence {
        iterations: config.max_iterations,
    })
}

/// Mean consistency index of random reciprocal matrices, n = 3..=10.
/// Monte Carlo values over the 1/9..9 scale; see `derive_random_index`.
const RANDOM_INDEX: [f64; 8] = [0.5247, 0.8816, 1.1086, 1.2479, 1.3417, 1.4057, 1.4499, 1.4854];

pub fn random_index(n: usize) -> Result<f64, CalibrationError> {
    if (3..=10).contains(&n) {
        Ok(RANDOM_INDEX[n - 3])
    } else {
        Err(CalibrationError::UnsupportedDimension(n))
    }
}

/// The 17 values of the 1/9..9 judgement scale.
pub fn saaty_scale() -> [f64; 17] {
    let mut out = [0.0; 17];
    for k in 0..8 {
        out[k] = 1.0 / (9 - k) as f64;
        out[16 - k] = (9 - k) as f64;
    }
    out[8] = 1.0;
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomIndexEstimate {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub mean_ci: f64,
    pub std_error: f64,
    pub shipped: f64,
}

/// Estimates the random index for dimension `n` by averaging the CI of
/// `samples` random reciprocal matrices. Deterministic for a given seed.
pub fn derive_random_index(n: usize, samples: usize, seed: u64) -> Result<RandomIndexEstimate, CalibrationError> {
    let shipped = random_index(n)?;
    if samples == 0 {
        return Err(CalibrationError::EmptyObservations);
    }
    let scale = saaty_scale();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = AhpConfig::default();
    let mut cells = vec![vec![1.0; n]; n];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        for i in 0..n {
            for j in i + 1..n {
                let v = scale[rng.random_range(0..scale.len())];
                cells[i][j] = v;
                cells[j][i] = 1.0 / v;
            }
        }
        let m = PairwiseMatrix { n, cells: cells.clone() };
        let r = ahp_weights_with(&m, &config)?;
        sum += r.ci;
        sum_sq += r.ci * r.ci;
    }
    let k = samples as f64;
    let mean = sum / k;
    let var = (sum_sq / k - mean * mean).max(0.0);
    Ok(RandomIndexEstimate {
        n,
        samples,
        seed,
        mean_ci: mean,
        std_error: (var / k).sqrt(),
        shipped,
    })
}

/// Largest-remainder apportionment of `raw` to integers summing to `total`.
/// Ties in the remainder go to the lower index.
pub fn largest_remainder(raw: &[f64], total: u32) -> Result<Vec<u32>, CalibrationError> {
    for (col, &v) in raw.iter().enumerate() {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CalibrationError::NonPositiveEntry { row: 0, col });
        }
    }
    let sum: f64 = raw.iter().sum();
    let quotas: Vec<f64> = raw
        .iter()
        .map(|v| {
            let q = v * f64::from(total) / sum;
            // 0.30 / 1.0 * 100 must floor to 30, not 29
            if (q - q.round()).abs() < 1e-9 {
                q.round()
            } else {
                q
            }
        })
        .collect();
    let mut out: Vec<u32> = quotas.iter().map(|q| q.floor() as u32).collect();
    let assigned: u32 = out.iter().sum();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned) as usize) {
        out[i] += 1;
    }
    Ok(out)
}

/// Scales four positive values to hundredths summing to exactly 100.
pub fn normalize_weights(criterion: Criterion, raw: &[f64]) -> Result<WeightVector, CalibrationError> {
    if raw.len() != 4 {
        return Err(CalibrationError::ShapeMismatch { n: 4 });
    }
    let parts = largest_remainder(raw, 100)?;
    let mut weights = [0u8; 4];
    for (index, (&p, w)) in parts.iter().zip(weights.iter_mut()).enumerate() {
        if !(u32::from(WEIGHT_MIN)..=u32::from(WEIGHT_MAX)).contains(&p) {
            return Err(CalibrationError::BoxViolation { index, value: p });
        }
        *w = p as u8;
    }
    Ok(WeightVector::new(criterion, weights).expect("box and sum checked"))
}

/// An expert's holistic criterion score next to the four arena scores it
/// summarizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalibrationObservation {
    pub criterion: Criterion,
    pub arena_scores: [Tenths; 4],
    pub target: Thousandths,
}

/// Squared residual sum in thousandths², exact.
pub fn fit_objective(weights: &[u8; 4], observations: &[CalibrationObservation]) -> i128 {
    observations
        .iter()
        .map(|o| {
            let predicted: i128 = weights
                .iter()
                .zip(&o.arena_scores)
                .map(|(&w, s)| i128::from(w) * i128::from(s.get()))
                .sum();
            let r = predicted - i128::from(o.target.0);
            r * r
        })
        .sum()
}

fn distance_sq(a: &[u8; 4], b: &[u8; 4]) -> i32 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (i32::from(x) - i32::from(y)).pow(2))
        .sum()
}

/// Every integer-hundredths weight vector inside the box, lexicographic.
pub fn feasible_weights() -> impl Iterator<Item = [u8; 4]> {
    let (lo, hi) = (WEIGHT_MIN, WEIGHT_MAX);
    (lo..=hi).flat_map(move |a| {
        (lo..=hi).flat_map(move |b| {
            (lo..=hi).filter_map(move |c| {
                let d = 100i16 - i16::from(a) - i16::from(b) - i16::from(c);
                (i16::from(lo)..=i16::from(hi))
                    .contains(&d)
                    .then_some([a, b, c, d as u8])
            })
        })
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitReport {
    pub weights: WeightVector,
    pub objective: i128,
    pub prior: WeightVector,
    pub prior_objective: i128,
    pub observations: usize,
    pub candidates: usize,
}

/// Least-squares weights over the feasible grid, ties broken by distance to
/// the prior and then lexicographically.
pub fn fit_weights(
    criterion: Criterion,
    observations: &[CalibrationObservation],
    prior: &WeightVector,
) -> Result<WeightVector, CalibrationError> {
    fit_weights_report(criterion, observations, prior).map(|r| r.weights)
}

pub fn fit_weights_report(
    criterion: Criterion,
    observations: &[CalibrationObservation],
    prior: &WeightVector,
) -> Result<FitReport, CalibrationError> {
    if observations.is_empty() {
        return Err(CalibrationError::EmptyObservations);
    }
    if prior.criterion() != criterion {
        return Err(CalibrationError::CriterionMismatch {
            index: 0,
            expected: criterion,
            found: prior.criterion(),
        });
    }
    for (index, o) in observations.iter().enumerate() {
        if o.criterion != criterion {
            return Err(CalibrationError::CriterionMismatch {
                index,
                expected: criterion,
                found: o.criterion,
            });
        }
        if !(1000..=3000).contains(&o.target.0) {
            return Err(CalibrationError::TargetOutOfRange { index, target: o.target });
        }
    }
    let p = prior.hundredths();
    let mut best: Option<([u8; 4], i128, i32)> = None;
    let mut candidates = 0;
    for w in feasible_weights() {
        candidates += 1;
        let obj = fit_objective(&w, observations);
        let dist = distance_sq(&w, &p);
        // strict comparison keeps the lexicographically first on full ties
        if best.is_none_or(|(_, bo, bd)| (obj, dist) < (bo, bd)) {
            best = Some((w, obj, dist));
        }
    }
    let (w, objective, _) = best.expect("feasible set is non-empty");
    Ok(FitReport {
        weights: WeightVector::new(criterion, w).expect("feasible"),
        objective,
        prior: *prior,
        prior_objective: fit_objective(&p, observations),
        observations: observations.len(),
        candidates,
    })
}
