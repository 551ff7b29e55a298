//! Fixed-point and rational number types used by every score computation.
//!
//! Scores are tenths, weights are hundredths, composites are thousandths and
//! averages are exact rationals. Binary floating point never enters a
//! threshold comparison.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScoreError {
    #[error("`{0}` is not a decimal number")]
    Unparseable(String),
    #[error("`{0}` lies outside the 1.0..3.0 scale")]
    OutOfRange(String),
    #[error("`{0}` must be a multiple of 0.1")]
    OffGrid(String),
}

impl ScoreError {
    /// Short machine code used in field-level diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            ScoreError::Unparseable(_) => "Unparseable",
            ScoreError::OutOfRange(_) => "OutOfRange",
            ScoreError::OffGrid(_) => "OffGrid",
        }
    }
}

/// A plain decimal literal: optional sign, digits, optional fraction.
/// Returns `(numerator, 10^scale)`.
pub(crate) fn parse_decimal(text: &str) -> Option<(i128, i128)> {
    let s = text.trim();
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    // Trailing zeros carry no value; strip them so long inputs stay in range.
    let frac = frac.trim_end_matches('0');
    let int = int.trim_start_matches('0');
    if int.len() + frac.len() > 30 {
        return None;
    }
    let mut num: i128 = 0;
    for b in int.bytes().chain(frac.bytes()) {
        num = num * 10 + i128::from(b - b'0');
    }
    let den = 10i128.pow(frac.len() as u32);
    Some((if neg { -num } else { num }, den))
}

/// A score on the 1.0..=3.0 scale in steps of 0.1, stored as tenths (10..=30).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tenths(u8);

impl Tenths {
    pub const MIN: Tenths = Tenths(10);
    pub const MAX: Tenths = Tenths(30);
    /// Gate cap and arena elimination floor (2.0).
    pub const FLOOR: Tenths = Tenths(20);

    pub fn new(tenths: u8) -> Option<Self> {
        (10..=30).contains(&tenths).then_some(Tenths(tenths))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Every admissible score, ascending.
    pub fn grid() -> impl Iterator<Item = Tenths> {
        (10..=30).map(Tenths)
    }
}

/// Parses a decimal text score and checks it against the 0.1 grid.
pub fn validate_score(raw: &str) -> Result<Tenths, ScoreError> {
    let err_text = || raw.trim().to_string();
    let (num, den) = parse_decimal(raw).ok_or_else(|| ScoreError::Unparseable(err_text()))?;
    // range first: 3.05 is out of range rather than off grid
    if num < den || num > 3 * den {
        return Err(ScoreError::OutOfRange(err_text()));
    }
    let scaled = num * 10;
    if scaled % den != 0 {
        return Err(ScoreError::OffGrid(err_text()));
    }
    Ok(Tenths((scaled / den) as u8))
}

impl fmt::Display for Tenths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.0 / 10, self.0 % 10)
    }
}

impl FromStr for Tenths {
    type Err = ScoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        validate_score(s)
    }
}

impl Serialize for Tenths {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Tenths {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        validate_score(&s).map_err(serde::de::Error::custom)
    }
}

/// A value in thousandths, e.g. a weighted composite. Serialized as `"2.500"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Thousandths(pub i64);

impl Thousandths {
    pub fn to_exact(self) -> Exact {
        Exact(Ratio::new(self.0, 1000))
    }
}

impl fmt::Display for Thousandths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let v = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:03}", v / 1000, v % 1000)
    }
}

impl Serialize for Thousandths {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Thousandths {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let (num, den) = parse_decimal(&s)
            .filter(|&(_, den)| den <= 1000)
            .ok_or_else(|| serde::de::Error::custom(format!("`{s}` is not a 3-place decimal")))?;
        i64::try_from(num * (1000 / den))
            .map(Thousandths)
            .map_err(serde::de::Error::custom)
    }
}

/// An exact rational. Serialized as `"p/q"` in lowest terms (or `"p"`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Ratio<i64>);

impl Exact {
    pub fn new(numer: i64, denom: i64) -> Self {
        Exact(Ratio::new(numer, denom))
    }

    pub fn from_tenths(t: Tenths) -> Self {
        Exact::new(i64::from(t.get()), 10)
    }

    pub fn from_integer(v: i64) -> Self {
        Exact(Ratio::from_integer(v))
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    /// Approximate value for display or plotting only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Half-up rounding to `places` decimals, formatted with exactly that
    /// many fractional digits.
    pub fn round_half_up(&self, places: u32) -> String {
        let scale = 10i128.pow(places);
        let num = i128::from(*self.0.numer());
        let den = i128::from(*self.0.denom());
        let neg = num < 0;
        let scaled = (2 * num.abs() * scale + den) / (2 * den);
        let int = scaled / scale;
        let frac = scaled % scale;
        let sign = if neg && scaled != 0 { "-" } else { "" };
        if places == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac:0width$}", width = places as usize)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Exact {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("`{s}` is not an exact rational");
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Ok(Exact::new(n, d))
            }
            None => s.trim().parse().map(Exact::from_integer).map_err(|_| bad()),
        }
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl std::ops::Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        Exact(self.0 + rhs.0)
    }
}

impl std::iter::Sum for Exact {
    fn sum<I: Iterator<Item = Exact>>(iter: I) -> Exact {
        iter.fold(Exact::from_integer(0), |a, b| a + b)
    }
}
