//! Fixed-point face feature vectors and the threshold similarity predicate.
//!
//! Coordinates are integers at scale `2^16`; the inner product of two vectors
//! is therefore at scale `2^32`, which is also the scale of the threshold.

use serde::{Deserialize, Serialize};

pub const FEATURE_DIM: usize = 128;
pub const COORD_SCALE_BITS: u32 = 16;
pub const COORD_SCALE: i64 = 1 << COORD_SCALE_BITS;
/// Exclusive bound on `|coord|`, matching the circuit's 17-bit magnitude check.
pub const COORD_BOUND: i64 = 1 << 17;
/// Squared norm of a unit vector at scale `2^32`.
pub const UNIT_NORM_SQ: i64 = 1 << 32;
pub const SIMILARITY_SCALE: f64 = UNIT_NORM_SQ as f64;
pub const DEFAULT_EPS_NORM: i64 = 1 << 20;
pub const DEFAULT_THRESHOLD: f64 = 0.90;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FaceError {
    #[error("feature vector has zero norm")]
    ZeroNormVector,
    #[error("expected {FEATURE_DIM} coordinates, got {0}")]
    DimensionMismatch(usize),
    #[error("coordinate {index} is not a finite number")]
    NonFinite { index: usize },
    #[error("coordinate {index} out of range: {value}")]
    CoordinateOutOfRange { index: usize, value: i64 },
    #[error("squared norm {norm_sq} deviates from 2^32 by more than {eps}")]
    NormOutOfTolerance { norm_sq: i64, eps: i64 },
    #[error("invalid configuration: {0}")]
    ConfigError(String),
    #[error("malformed feature file: {0}")]
    Malformed(String),
}

/// A 128-dimensional unit vector quantized to multiples of `2^-16`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct FeatureVector {
    coords: Box<[i64; FEATURE_DIM]>,
}

impl std::fmt::Debug for FeatureVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FeatureVector(norm_sq={}, ..)", self.norm_sq())
    }
}

impl TryFrom<Vec<i64>> for FeatureVector {
    type Error = FaceError;
    fn try_from(v: Vec<i64>) -> Result<Self, FaceError> {
        FeatureVector::new(&v)
    }
}

impl From<FeatureVector> for Vec<i64> {
    fn from(v: FeatureVector) -> Self {
        v.coords.to_vec()
    }
}

impl FeatureVector {
    /// Validates coordinate range and unit norm (within [`DEFAULT_EPS_NORM`]).
    pub fn new(coords: &[i64]) -> Result<Self, FaceError> {
        let v = Self::from_coords_unvalidated(coords)?;
        v.check_range()?;
        v.check_norm(DEFAULT_EPS_NORM)?;
        Ok(v)
    }

    /// Only checks the dimension. Used to feed deliberately malformed
    /// vectors to the circuit and contracts.
    pub fn from_coords_unvalidated(coords: &[i64]) -> Result<Self, FaceError> {
        let arr: [i64; FEATURE_DIM] = coords
            .try_into()
            .map_err(|_| FaceError::DimensionMismatch(coords.len()))?;
        Ok(FeatureVector { coords: Box::new(arr) })
    }

    pub fn coords(&self) -> &[i64; FEATURE_DIM] {
        &self.coords
    }

    pub fn norm_sq(&self) -> i64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    pub fn check_range(&self) -> Result<(), FaceError> {
        match self.coords.iter().position(|c| c.abs() >= COORD_BOUND) {
            Some(index) => Err(FaceError::CoordinateOutOfRange {
                index,
                value: self.coords[index],
            }),
            None => Ok(()),
        }
    }

    pub fn check_norm(&self, eps: i64) -> Result<(), FaceError> {
        let norm_sq = self.norm_sq();
        if (norm_sq - UNIT_NORM_SQ).abs() > eps {
            return Err(FaceError::NormOutOfTolerance { norm_sq, eps });
        }
        Ok(())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|&c| c as f64 / COORD_SCALE as f64).collect()
    }
}

/// Threshold `tau` and its fixed-point form `round(tau · 2^32)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ThresholdFile")]
pub struct ThresholdConfig {
    pub tau: f64,
    pub tau_fixed: i64,
    pub eps_norm: i64,
}

#[derive(Deserialize)]
struct ThresholdFile {
    tau: f64,
    tau_fixed: i64,
    eps_norm: i64,
}

impl TryFrom<ThresholdFile> for ThresholdConfig {
    type Error = FaceError;
    fn try_from(f: ThresholdFile) -> Result<Self, FaceError> {
        let cfg = ThresholdConfig::new(f.tau)?.with_eps_norm(f.eps_norm)?;
        if cfg.tau_fixed != f.tau_fixed {
            return Err(FaceError::ConfigError(format!(
                "tau_fixed {} inconsistent with tau {}",
                f.tau_fixed, f.tau
            )));
        }
        Ok(cfg)
    }
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig::new(DEFAULT_THRESHOLD).expect("default threshold is in range")
    }
}

impl ThresholdConfig {
    pub fn new(tau: f64) -> Result<Self, FaceError> {
        if !tau.is_finite() || !(-1.0..=1.0).contains(&tau) {
            return Err(FaceError::ConfigError(format!("threshold {tau} outside [-1, 1]")));
        }
        Ok(ThresholdConfig {
            tau,
            tau_fixed: (tau * SIMILARITY_SCALE).round() as i64,
            eps_norm: DEFAULT_EPS_NORM,
        })
    }

    /// Norm tolerance is capped at `2^21` so the circuit's 23-bit slack
    /// checks cannot wrap.
    pub fn with_eps_norm(mut self, eps_norm: i64) -> Result<Self, FaceError> {
        if !(0..=(1 << 21)).contains(&eps_norm) {
            return Err(FaceError::ConfigError(format!("eps_norm {eps_norm} outside [0, 2^21]")));
        }
        self.eps_norm = eps_norm;
        Ok(self)
    }
}

/// Divides by the Euclidean norm and rounds each coordinate to the nearest
/// multiple of `2^-16`.
pub fn normalize_features(raw: &[f64]) -> Result<FeatureVector, FaceError> {
    if raw.len() != FEATURE_DIM {
        return Err(FaceError::DimensionMismatch(raw.len()));
    }
    if let Some(index) = raw.iter().position(|x| !x.is_finite()) {
        return Err(FaceError::NonFinite { index });
    }
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm >= 1e-9) || !norm.is_finite() {
        return Err(FaceError::ZeroNormVector);
    }
    let coords: Vec<i64> = raw
        .iter()
        .map(|x| (x / norm * COORD_SCALE as f64).round() as i64)
        .collect();
    FeatureVector::new(&coords)
}

/// Exact fixed-point inner product at scale `2^32`.
pub fn cosine_similarity_fixed(a: &FeatureVector, b: &FeatureVector) -> i64 {
    a.coords.iter().zip(b.coords.iter()).map(|(x, y)| x * y).sum()
}

/// `true` iff the similarity is at least the threshold (inclusive).
pub fn face_match(a: &FeatureVector, b: &FeatureVector, cfg: &ThresholdConfig) -> bool {
    cosine_similarity_fixed(a, b) >= cfg.tau_fixed
}

/// Contents of a feature-vector file before normalization.
#[derive(Debug, Clone, PartialEq)]
pub enum RawFeatures {
    Fixed(Vec<i64>),
    Float(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FeatureFile {
    Bare(Vec<i64>),
    Tagged { encoding: Encoding, values: serde_json::Value },
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum Encoding {
    Fixed,
    Float,
}

impl RawFeatures {
    /// Accepts either a bare JSON array of 128 fixed-point integers or
    /// `{"encoding": "fixed" | "float", "values": [...]}`.
    pub fn from_json(text: &str) -> Result<Self, FaceError> {
        let file: FeatureFile =
            serde_json::from_str(text).map_err(|e| FaceError::Malformed(e.to_string()))?;
        let raw = match file {
            FeatureFile::Bare(v) => RawFeatures::Fixed(v),
            FeatureFile::Tagged { encoding, values } => {
                let malformed = |e: serde_json::Error| FaceError::Malformed(e.to_string());
                match encoding {
                    Encoding::Fixed => RawFeatures::Fixed(serde_json::from_value(values).map_err(malformed)?),
                    Encoding::Float => RawFeatures::Float(serde_json::from_value(values).map_err(malformed)?),
                }
            }
        };
        let len = match &raw {
            RawFeatures::Fixed(v) => v.len(),
            RawFeatures::Float(v) => v.len(),
        };
        if len != FEATURE_DIM {
            return Err(FaceError::DimensionMismatch(len));
        }
        Ok(raw)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            RawFeatures::Fixed(v) => v.iter().map(|&c| c as f64 / COORD_SCALE as f64).collect(),
            RawFeatures::Float(v) => v.clone(),
        }
    }

    pub fn normalize(&self) -> Result<FeatureVector, FaceError> {
        normalize_features(&self.to_f64())
    }

    pub fn to_json(&self) -> String {
        match self {
            RawFeatures::Fixed(v) => serde_json::to_string(v),
            RawFeatures::Float(v) => serde_json::to_string(&serde_json::json!({
                "encoding": "float",
                "values": v,
            })),
        }
        .expect("vectors serialize")
    }
}
