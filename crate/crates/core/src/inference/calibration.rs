//! Synthetic score distributions for fitting empirical likelihood models.
//!
//! Follow scores compare a noisy copy of a target with the target itself.
//! Other-target scores compare a noisy copy lagged by a random phase with
//! the unlagged target, which is what a follower of a phase-shifted
//! neighbour produces. Null scores compare windows of a synthetic
//! fixation/saccade trace with target windows.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::kde::{fit_kde, Bandwidth, PdfLabel};
use crate::inference::likelihood::EmpiricalModel;
use crate::similarity::Measure;
use crate::trajectory::{
    distort, gen_null_behavior, window_at, DistortionModel, NullBehaviorModel, Trajectory,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub measure: Measure,
    pub window: usize,
    /// Scores drawn per role.
    pub samples: usize,
    /// Follow noise SD is drawn uniformly from this range (fraction of path scale).
    pub noise_range: (f64, f64),
    pub null_model: NullBehaviorModel,
    pub seed: u64,
}

impl CalibrationConfig {
    pub fn new(measure: Measure, window: usize, seed: u64) -> Self {
        Self {
            measure,
            window,
            samples: 500,
            noise_range: (0.05, 0.15),
            null_model: NullBehaviorModel::with_seed(seed ^ 0x5eed),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoreSamples {
    pub follow: Vec<f64>,
    pub null: Vec<f64>,
    pub other: Vec<f64>,
}

fn check(targets: &[Trajectory], cfg: &CalibrationConfig) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::invalid("calibration needs at least one target"));
    }
    if let Some(t) = targets.iter().find(|t| !t.is_closed()) {
        return Err(Error::invalid(format!(
            "calibration targets must be closed paths ({} samples, open)",
            t.len()
        )));
    }
    let min_len = targets.iter().map(Trajectory::len).min().unwrap_or(0);
    if cfg.window < cfg.measure.min_len() || cfg.window > min_len {
        return Err(Error::range(format!(
            "window {} outside [{}, {min_len}]",
            cfg.window,
            cfg.measure.min_len()
        )));
    }
    let (lo, hi) = cfg.noise_range;
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
        return Err(Error::invalid(format!("bad noise range [{lo}, {hi}]")));
    }
    if cfg.samples == 0 {
        return Err(Error::invalid("samples must be at least 1"));
    }
    if matches!(cfg.measure, Measure::VarianceRatio) {
        return Err(Error::invalid(
            "variance_ratio is not a follow/target similarity",
        ));
    }
    Ok(())
}

/// Draws `cfg.samples` scores for each role. Deterministic given `cfg.seed`.
pub fn simulate_scores(targets: &[Trajectory], cfg: &CalibrationConfig) -> Result<ScoreSamples> {
    check(targets, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let w = cfg.window;
    let (lo, hi) = cfg.noise_range;
    let noisy = |rng: &mut ChaCha8Rng, t: &Trajectory| -> Result<Trajectory> {
        let sd = if hi > lo {
            rng.random_range(lo..=hi)
        } else {
            lo
        };
        distort(t, &DistortionModel::noise(sd, rng.next_u64()))
    };

    let mut out = ScoreSamples::default();
    for _ in 0..cfg.samples {
        let t = &targets[rng.random_range(0..targets.len())];
        let n = t.len();
        let s = rng.random_range(0..n);
        let u = noisy(&mut rng, t)?;
        let tw = window_at(t, s, w, true)?;
        out.follow
            .push(cfg.measure.score(&window_at(&u, s, w, true)?, &tw)?.value);

        // lag by at least an eighth of the loop either way
        let lag = rng.random_range(n.div_ceil(8)..=n - n.div_ceil(8));
        let u = noisy(&mut rng, t)?;
        let uw = window_at(&u, (s + lag) % n, w, true)?;
        out.other.push(cfg.measure.score(&uw, &tw)?.value);
    }

    let trace_len = (cfg.samples * w / 4).max(3000);
    let null = gen_null_behavior(trace_len, &cfg.null_model, targets[0].sample_rate_hz())?;
    for _ in 0..cfg.samples {
        let t = &targets[rng.random_range(0..targets.len())];
        let s = rng.random_range(0..t.len());
        let ns = rng.random_range(0..=trace_len - w);
        let r = cfg
            .measure
            .score(&window_at(&null, ns, w, false)?, &window_at(t, s, w, true)?)?;
        out.null.push(r.value);
    }
    Ok(out)
}

/// Fits follow, null and other-target densities from simulated scores.
pub fn fit_empirical(
    targets: &[Trajectory],
    cfg: &CalibrationConfig,
    bandwidth: Bandwidth,
) -> Result<EmpiricalModel> {
    let s = simulate_scores(targets, cfg)?;
    Ok(EmpiricalModel {
        follow: fit_kde(&s.follow, bandwidth, PdfLabel::Follow)?,
        null: Some(fit_kde(&s.null, bandwidth, PdfLabel::Null)?),
        other: Some(fit_kde(&s.other, bandwidth, PdfLabel::Other)?),
    })
}
