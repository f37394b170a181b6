use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::similarity::Measure;
use crate::trajectory::{window_at, Point2, Trajectory};

/// How one row of window-to-window similarities becomes a distribution.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileMode {
    /// Subtract the row minimum, then normalise.
    #[default]
    LambdaFree,
    /// Uniform over the windows scoring above `lambda`.
    Thresholded { lambda: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyProfile {
    pub window_size: usize,
    /// Entropy in bits, indexed by window start.
    pub per_window_entropy: Vec<f64>,
}

impl EntropyProfile {
    pub fn mean(&self) -> f64 {
        self.per_window_entropy.iter().sum::<f64>() / self.per_window_entropy.len() as f64
    }

    /// Population standard deviation across window starts.
    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        let n = self.per_window_entropy.len() as f64;
        (self
            .per_window_entropy
            .iter()
            .map(|h| (h - m) * (h - m))
            .sum::<f64>()
            / n)
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSweepPoint {
    pub window: usize,
    pub mean_entropy_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSweep {
    pub points: Vec<WindowSweepPoint>,
    /// Window size with the lowest mean entropy (first one on ties).
    pub argmin: usize,
}

/// Entropy of a non-negative weight vector, or of the uniform distribution
/// when every weight is zero.
fn weights_entropy(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return (weights.len() as f64).log2();
    }
    let h: f64 = weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

fn row_entropy(row: &[f64], mode: ProfileMode) -> f64 {
    match mode {
        ProfileMode::LambdaFree => {
            let min = row.iter().cloned().fold(f64::INFINITY, f64::min);
            let shifted: Vec<f64> = row.iter().map(|r| r - min).collect();
            weights_entropy(&shifted)
        }
        ProfileMode::Thresholded { lambda } => {
            let above: Vec<f64> = row
                .iter()
                .map(|&r| if r > lambda { 1.0 } else { 0.0 })
                .collect();
            weights_entropy(&above)
        }
    }
}

fn all_windows(traj: &Trajectory, w: usize) -> Result<Vec<Vec<Point2>>> {
    (0..traj.len())
        .map(|s| window_at(traj, s, w, true).map(|w| w.into_points()))
        .collect()
}

fn check_closed(traj: &Trajectory) -> Result<()> {
    if traj.is_closed() {
        Ok(())
    } else {
        Err(Error::invalid("entropy profiles need a closed trajectory"))
    }
}

fn check_window(traj: &Trajectory, w: usize, measure: &Measure) -> Result<()> {
    if w < measure.min_len().max(2) || w > traj.len() {
        return Err(Error::invalid(format!(
            "window {w} outside [{}, {}]",
            measure.min_len().max(2),
            traj.len()
        )));
    }
    Ok(())
}

/// For every window start, compares the window with the windows at every
/// start along the (closed) path and records how concentrated the
/// resulting distribution is.
pub fn entropy_profile(
    traj: &Trajectory,
    w: usize,
    measure: &Measure,
    mode: ProfileMode,
) -> Result<EntropyProfile> {
    check_closed(traj)?;
    check_window(traj, w, measure)?;
    let windows = all_windows(traj, w)?;
    let per_window_entropy = windows
        .par_iter()
        .map(|a| {
            let row = windows
                .iter()
                .map(|b| measure.score(a, b).map(|s| s.value))
                .collect::<Result<Vec<f64>>>()?;
            Ok(row_entropy(&row, mode))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EntropyProfile {
        window_size: w,
        per_window_entropy,
    })
}

/// Mean profile entropy for each window size in `windows`.
pub fn mean_entropy_vs_window(
    traj: &Trajectory,
    measure: &Measure,
    windows: RangeInclusive<usize>,
    mode: ProfileMode,
) -> Result<WindowSweep> {
    check_closed(traj)?;
    if windows.is_empty() {
        return Err(Error::invalid("empty window range"));
    }
    check_window(traj, *windows.start(), measure)?;
    check_window(traj, *windows.end(), measure)?;
    let points = windows
        .map(|w| {
            entropy_profile(traj, w, measure, mode).map(|p| WindowSweepPoint {
                window: w,
                mean_entropy_bits: p.mean(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let argmin = points
        .iter()
        .fold(None::<&WindowSweepPoint>, |best, p| match best {
            Some(b) if b.mean_entropy_bits <= p.mean_entropy_bits => Some(b),
            _ => Some(p),
        })
        .map(|p| p.window)
        .unwrap_or_default();
    Ok(WindowSweep { points, argmin })
}
