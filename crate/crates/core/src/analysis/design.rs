use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::similarity::{Measure, SimilarityScore};
use crate::trajectory::{
    distort, gen_circle, rotate_window, window_at, Direction, DistortionModel, Point2, Trajectory,
};

/// Start of target `k`'s window when `n_targets` targets share one closed
/// path at equal phase offsets.
pub fn target_window_start(n: usize, n_targets: usize, k: usize, window_start: usize) -> usize {
    let offset = ((k * n) as f64 / n_targets as f64).round() as usize;
    (window_start + offset) % n
}

/// Similarity between the reference target's window and every target's
/// window over the same time interval. Target `k` (0-based) runs
/// `round(k * n / n_targets)` samples ahead of target 0.
pub fn pairwise_target_similarity(
    path: &Trajectory,
    n_targets: usize,
    window_start: usize,
    w: usize,
    measure: &Measure,
    reference: usize,
) -> Result<Vec<SimilarityScore>> {
    if !path.is_closed() {
        return Err(Error::invalid("targets need a closed path"));
    }
    if n_targets == 0 || n_targets > path.len() {
        return Err(Error::range(format!(
            "{n_targets} targets on a {}-sample path",
            path.len()
        )));
    }
    if reference >= n_targets {
        return Err(Error::range(format!(
            "reference {reference} out of range for {n_targets} targets"
        )));
    }
    if w > path.len() {
        return Err(Error::range(format!("window {w} longer than the path")));
    }
    let n = path.len();
    let win = |k: usize| {
        window_at(
            path,
            target_window_start(n, n_targets, k, window_start),
            w,
            true,
        )
    };
    let r = win(reference)?;
    (0..n_targets)
        .map(|k| measure.score(&r, &win(k)?))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationConfig {
    pub measure: Measure,
    pub radius: f64,
    pub n: usize,
    pub w: usize,
    pub window_start: usize,
    /// Noise SD as a fraction of the radius.
    pub noise_sd: f64,
    pub seed: u64,
    /// Scores are averaged over this many noisy copies (seeds `seed..seed + reps`).
    pub reps: usize,
    pub theta_grid_deg: Vec<f64>,
}

impl RotationConfig {
    pub fn new(measure: Measure, seed: u64) -> Self {
        Self {
            measure,
            radius: 1.0,
            n: 60,
            w: 20,
            window_start: 0,
            noise_sd: 0.1,
            seed,
            reps: 1,
            theta_grid_deg: (0..72).map(|i| i as f64 * 5.0).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationPoint {
    pub theta_deg: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationCurve {
    pub points: Vec<RotationPoint>,
    /// `max - min` of the scores.
    pub range: f64,
}

impl RotationCurve {
    pub fn min(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.score)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.score)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Scores one circle window against a noisy copy of itself with both
/// rotated by each angle of the grid.
pub fn rotation_sensitivity(cfg: &RotationConfig) -> Result<RotationCurve> {
    if cfg.w > cfg.n {
        return Err(Error::invalid(format!(
            "window {} longer than {} samples",
            cfg.w, cfg.n
        )));
    }
    if cfg.reps == 0 {
        return Err(Error::invalid("reps must be at least 1"));
    }
    let circle = gen_circle(cfg.radius, cfg.n, 0.0, Direction::Ccw, Point2::ORIGIN, 30.0)?;
    let t = window_at(&circle, cfg.window_start, cfg.w, true)?;
    let copies = (0..cfg.reps as u64)
        .map(|r| {
            let noisy = distort(
                &circle,
                &DistortionModel::noise(cfg.noise_sd, cfg.seed.wrapping_add(r)),
            )?;
            window_at(&noisy, cfg.window_start, cfg.w, true)
        })
        .collect::<Result<Vec<_>>>()?;

    let points = cfg
        .theta_grid_deg
        .iter()
        .map(|&theta| {
            let tr = rotate_window(&t, theta);
            let total = copies
                .iter()
                .map(|u| {
                    cfg.measure
                        .score(&rotate_window(u, theta), &tr)
                        .map(|s| s.value)
                })
                .sum::<Result<f64>>()?;
            Ok(RotationPoint {
                theta_deg: theta,
                score: total / cfg.reps as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut curve = RotationCurve { points, range: 0.0 };
    if !curve.points.is_empty() {
        curve.range = curve.max() - curve.min();
    }
    Ok(curve)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub n_samples: usize,
    pub count_above: usize,
    pub proportion: f64,
    pub entropy_bits: f64,
    pub max_targets_bidirectional: usize,
}

/// Mean similarity between circle windows `lag` samples apart, for every
/// lag, under perfect following.
pub fn lag_profile(n: usize, w: usize, measure: &Measure) -> Result<Vec<f64>> {
    if w > n {
        return Err(Error::invalid(format!(
            "window {w} longer than the {n}-sample loop"
        )));
    }
    let circle = gen_circle(1.0, n, 0.0, Direction::Ccw, Point2::ORIGIN, 30.0)?;
    let windows = (0..n)
        .map(|s| window_at(&circle, s, w, true))
        .collect::<Result<Vec<_>>>()?;
    (0..n)
        .into_par_iter()
        .map(|d| {
            let total = (0..n)
                .map(|s| {
                    measure
                        .score(&windows[s], &windows[(s + d) % n])
                        .map(|r| r.value)
                })
                .sum::<Result<f64>>()?;
            Ok(total / n as f64)
        })
        .collect()
}

/// How many targets a circular design supports: counts the lags whose mean
/// similarity exceeds `lambda` on a loop of `sample_rate * 360 / speed`
/// samples. Targets in both directions fit `2 * ceil(N / count)`.
pub fn capacity_report(
    speed_deg_s: f64,
    sample_rate_hz: f64,
    lambda: f64,
    w: usize,
    measure: &Measure,
) -> Result<CapacityRow> {
    if !(speed_deg_s > 0.0 && sample_rate_hz > 0.0) {
        return Err(Error::invalid("speed and sample rate must be positive"));
    }
    let exact = sample_rate_hz * 360.0 / speed_deg_s;
    let n = exact.round();
    if (exact - n).abs() > 1e-9 * exact || n < 4.0 {
        return Err(Error::invalid(format!(
            "{speed_deg_s} deg/s at {sample_rate_hz} Hz is not a whole loop of >= 4 samples ({exact})"
        )));
    }
    let n = n as usize;
    let lags = lag_profile(n, w, measure)?;
    let count = lags.iter().filter(|&&r| r > lambda).count();
    // a lag count of zero still reports a finite row
    let c = count.max(1);
    Ok(CapacityRow {
        n_samples: n,
        count_above: count,
        proportion: count as f64 / n as f64,
        entropy_bits: (c as f64).log2(),
        max_targets_bidirectional: 2 * n.div_ceil(c),
    })
}
