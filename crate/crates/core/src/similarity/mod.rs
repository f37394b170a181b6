//! Similarity measures between an input window and a target window.
//!
//! Each measure returns a [`SimilarityScore`]. Windows whose geometry makes a
//! measure undefined (an axis with no variance, a window with no motion)
//! produce a score of 0 flagged `degenerate` instead of an error, so that
//! inference keeps running along straight path edges.

mod correlation;
mod residual;
mod spectral;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::Point2;

pub use correlation::{pearson_min_axis, principal_axis_deg, rotated_correlation};
pub use residual::{
    norm_euclidean_deriv, regression_slope_similarity, ss_ratio_2d, variance_ratio,
};
pub use spectral::{dominant_frequency, dominant_frequency_similarity};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScore {
    pub value: f64,
    /// Set when the measure was undefined for these windows.
    pub degenerate: bool,
}

impl SimilarityScore {
    pub const fn new(value: f64) -> Self {
        Self {
            value,
            degenerate: false,
        }
    }

    pub const fn degenerate() -> Self {
        Self {
            value: 0.0,
            degenerate: true,
        }
    }
}

/// Which transforms leave a measure unchanged.
///
/// `translation` and `scale` refer to transforming the input window only;
/// `rotation` to rotating both windows by the same angle; `symmetric` to
/// swapping the arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceFlags {
    pub translation: bool,
    pub scale: bool,
    pub rotation: bool,
    pub symmetric: bool,
}

/// Variances behind the stabilisation evidence: `ratio = sigma_s / sigma_f`.
/// A low ratio means the user is cancelling the disturbance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceComponents {
    pub sigma_s: f64,
    pub sigma_f: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Measure {
    PearsonMinAxis,
    RotatedCorrelation,
    SsRatio2d,
    NormEuclideanDeriv,
    RegressionSlope,
    DominantFrequency { sample_rate_hz: f64 },
    VarianceRatio,
}

impl Measure {
    /// All measures; `DominantFrequency` uses `sample_rate_hz`.
    pub fn all(sample_rate_hz: f64) -> [Measure; 7] {
        [
            Measure::PearsonMinAxis,
            Measure::RotatedCorrelation,
            Measure::SsRatio2d,
            Measure::NormEuclideanDeriv,
            Measure::RegressionSlope,
            Measure::DominantFrequency { sample_rate_hz },
            Measure::VarianceRatio,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Measure::PearsonMinAxis => "pearson_min_axis",
            Measure::RotatedCorrelation => "rotated_correlation",
            Measure::SsRatio2d => "ss_ratio_2d",
            Measure::NormEuclideanDeriv => "norm_euclidean_deriv",
            Measure::RegressionSlope => "regression_slope",
            Measure::DominantFrequency { .. } => "dominant_frequency",
            Measure::VarianceRatio => "variance_ratio",
        }
    }

    /// Parses a measure name. `sample_rate_hz` is only used by
    /// `dominant_frequency`.
    pub fn parse(name: &str, sample_rate_hz: f64) -> Result<Measure> {
        let m = match name.to_ascii_lowercase().replace('-', "_").as_str() {
            "pearson_min_axis" | "pearson" | "min_axis" => Measure::PearsonMinAxis,
            "rotated_correlation" | "rotated" => Measure::RotatedCorrelation,
            "ss_ratio_2d" | "ss_ratio" | "ss2d" => Measure::SsRatio2d,
            "norm_euclidean_deriv" | "euclidean" => Measure::NormEuclideanDeriv,
            "regression_slope" | "slope" => Measure::RegressionSlope,
            "dominant_frequency" | "frequency" => Measure::DominantFrequency { sample_rate_hz },
            "variance_ratio" | "variance" => Measure::VarianceRatio,
            other => return Err(Error::invalid(format!("unknown measure {other:?}"))),
        };
        Ok(m)
    }

    /// Smallest window length the measure accepts.
    pub fn min_len(&self) -> usize {
        match self {
            Measure::NormEuclideanDeriv => 4,
            Measure::DominantFrequency { .. } => 8,
            _ => 3,
        }
    }

    /// Score `u` (input) against `t` (target). For `VarianceRatio`, `u` is
    /// the summed motion and `t` the disturbance; the value is the raw ratio.
    pub fn score(&self, u: &[Point2], t: &[Point2]) -> Result<SimilarityScore> {
        match *self {
            Measure::PearsonMinAxis => pearson_min_axis(u, t),
            Measure::RotatedCorrelation => rotated_correlation(u, t),
            Measure::SsRatio2d => ss_ratio_2d(u, t),
            Measure::NormEuclideanDeriv => norm_euclidean_deriv(u, t),
            Measure::RegressionSlope => regression_slope_similarity(u, t),
            Measure::DominantFrequency { sample_rate_hz } => {
                dominant_frequency_similarity(u, t, sample_rate_hz)
            }
            Measure::VarianceRatio => variance_ratio(u, t).map(|c| SimilarityScore::new(c.ratio)),
        }
    }

    /// Value reached on identical, non-degenerate windows.
    pub fn max_value(&self) -> f64 {
        1.0
    }
}

impl FromStr for Measure {
    type Err = Error;

    /// Parses with a 30 Hz default rate for `dominant_frequency`.
    fn from_str(s: &str) -> Result<Self> {
        Measure::parse(s, 30.0)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Declared invariances of each measure.
pub fn invariance_flags(m: &Measure) -> InvarianceFlags {
    let flags = |translation, scale, rotation, symmetric| InvarianceFlags {
        translation,
        scale,
        rotation,
        symmetric,
    };
    match m {
        Measure::PearsonMinAxis => flags(true, true, false, true),
        Measure::RotatedCorrelation => flags(true, true, true, false),
        // Both reconstructions use only norms of centred points or of
        // derivatives, which a common rotation preserves.
        Measure::SsRatio2d => flags(true, false, true, false),
        Measure::NormEuclideanDeriv => flags(true, true, true, true),
        Measure::RegressionSlope => flags(true, false, false, false),
        Measure::DominantFrequency { .. } => flags(true, true, true, true),
        Measure::VarianceRatio => flags(true, false, true, false),
    }
}

pub(crate) fn check_pair(u: &[Point2], t: &[Point2], min_len: usize) -> Result<()> {
    if u.len() != t.len() {
        return Err(Error::invalid(format!(
            "window lengths differ: {} vs {}",
            u.len(),
            t.len()
        )));
    }
    if u.len() < min_len {
        return Err(Error::invalid(format!(
            "windows need at least {min_len} points, got {}",
            u.len()
        )));
    }
    Ok(())
}

/// Sum of squared deviations from the mean, or `None` when it is zero
/// relative to the magnitude of the values (constant up to rounding).
pub(crate) fn centered_ss(values: impl Iterator<Item = f64> + Clone) -> (f64, Option<f64>) {
    let (n, sum, sum_sq) = values
        .clone()
        .fold((0usize, 0.0, 0.0), |(n, s, q), v| (n + 1, s + v, q + v * v));
    let mean = sum / n as f64;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    // std/rms below 1e-9 is treated as no variation at all
    if ss <= 1e-18 * sum_sq || ss == 0.0 {
        (mean, None)
    } else {
        (mean, Some(ss))
    }
}
