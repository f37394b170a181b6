use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of samples a density is fit from.
pub const MIN_KDE_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdfLabel {
    Follow,
    Null,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Bandwidth {
    /// Silverman's rule of thumb.
    #[default]
    Auto,
    Fixed(f64),
}

/// Gaussian kernel density estimate over similarity scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPdf")]
pub struct EmpiricalPdf {
    samples: Vec<f64>,
    bandwidth: f64,
    label: PdfLabel,
}

#[derive(Deserialize)]
struct RawPdf {
    samples: Vec<f64>,
    bandwidth: f64,
    label: PdfLabel,
}

impl TryFrom<RawPdf> for EmpiricalPdf {
    type Error = Error;

    fn try_from(r: RawPdf) -> Result<Self> {
        EmpiricalPdf::from_parts(r.samples, r.bandwidth, r.label)
    }
}

impl EmpiricalPdf {
    pub fn from_parts(samples: Vec<f64>, bandwidth: f64, label: PdfLabel) -> Result<Self> {
        if samples.len() < MIN_KDE_SAMPLES {
            return Err(Error::invalid(format!(
                "kde needs at least {MIN_KDE_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("kde samples must be finite"));
        }
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::invalid(format!(
                "bandwidth must be > 0, got {bandwidth}"
            )));
        }
        Ok(Self {
            samples,
            bandwidth,
            label,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn label(&self) -> PdfLabel {
        self.label
    }

    pub fn density(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let norm = 1.0 / (self.samples.len() as f64 * h * (2.0 * PI).sqrt());
        let sum: f64 = self
            .samples
            .iter()
            .map(|s| {
                let z = (x - s) / h;
                (-0.5 * z * z).exp()
            })
            .sum();
        norm * sum
    }

    /// Natural log of the density, finite far out in the tails where
    /// `density` underflows to 0.
    pub fn log_density(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let exps: Vec<f64> = self
            .samples
            .iter()
            .map(|s| {
                let z = (x - s) / h;
                -0.5 * z * z
            })
            .collect();
        let m = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + exps.iter().map(|e| (e - m).exp()).sum::<f64>().ln();
        lse - (self.samples.len() as f64).ln() - h.ln() - 0.5 * (2.0 * PI).ln()
    }
}

/// Sample standard deviation (n - 1 denominator).
fn sample_sd(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

pub fn silverman_bandwidth(samples: &[f64]) -> f64 {
    1.06 * sample_sd(samples) * (samples.len() as f64).powf(-0.2)
}

pub fn fit_kde(samples: &[f64], bandwidth: Bandwidth, label: PdfLabel) -> Result<EmpiricalPdf> {
    if samples.len() < MIN_KDE_SAMPLES {
        return Err(Error::invalid(format!(
            "kde needs at least {MIN_KDE_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let h = match bandwidth {
        Bandwidth::Fixed(h) => h,
        Bandwidth::Auto => {
            let h = silverman_bandwidth(samples);
            let magnitude = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if !(h > 1e-12 * magnitude.max(1e-300)) {
                return Err(Error::invalid(
                    "samples have no spread; pass a fixed bandwidth",
                ));
            }
            h
        }
    };
    EmpiricalPdf::from_parts(samples.to_vec(), h, label)
}
