use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{bayes_update, BeliefState, LikelihoodModel};
use crate::similarity::Measure;
use crate::trajectory::{distort, gen_circle, window_at, Direction, DistortionModel, Point2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSweepConfig {
    pub n_targets: usize,
    pub speed_deg_s: f64,
    pub sample_rate_hz: f64,
    pub window: usize,
    /// Noise SD levels as fractions of the radius.
    pub noise_fractions: Vec<f64>,
    pub reps: usize,
    pub base_seed: u64,
    pub lambda: f64,
    pub measure: Measure,
}

impl NoiseSweepConfig {
    /// 16 targets at 180 deg/s and 30 Hz, window 30, noise 5% to 75%.
    pub fn new(base_seed: u64) -> Self {
        Self {
            n_targets: 16,
            speed_deg_s: 180.0,
            sample_rate_hz: 30.0,
            window: 30,
            noise_fractions: (1..=15).map(|i| i as f64 * 0.05).collect(),
            reps: 30,
            base_seed,
            lambda: 0.8,
            measure: Measure::PearsonMinAxis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSweepPoint {
    pub noise_fraction: f64,
    pub mean_entropy_bits: f64,
    pub reps: usize,
}

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one (noise level, repetition) cell.
pub fn cell_seed(base_seed: u64, level: usize, rep: usize) -> u64 {
    mix(mix(mix(base_seed) ^ level as u64) ^ rep as u64)
}

/// Entropy of the target belief as noise grows. Each repetition follows
/// target 1 with a fresh noisy copy; its entropy is the mean over every
/// window start of a step-likelihood belief over the targets alone.
pub fn noise_entropy_sweep(cfg: &NoiseSweepConfig) -> Result<Vec<NoiseSweepPoint>> {
    if cfg.reps == 0 || cfg.n_targets == 0 {
        return Err(Error::invalid("reps and n_targets must be at least 1"));
    }
    if !(cfg.speed_deg_s > 0.0 && cfg.sample_rate_hz > 0.0) {
        return Err(Error::invalid("speed and sample rate must be positive"));
    }
    let n = (cfg.sample_rate_hz * 360.0 / cfg.speed_deg_s).round() as usize;
    if cfg.window < cfg.measure.min_len() || cfg.window > n {
        return Err(Error::invalid(format!(
            "window {} outside the {n}-sample loop",
            cfg.window
        )));
    }
    let model = LikelihoodModel::Step { lambda: cfg.lambda };
    model.validate()?;
    let k = cfg.n_targets;
    let targets = (0..k)
        .map(|i| {
            let phase = 360.0 * i as f64 / k as f64;
            gen_circle(
                1.0,
                n,
                phase,
                Direction::Ccw,
                Point2::ORIGIN,
                cfg.sample_rate_hz,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let target_windows = targets
        .iter()
        .map(|t| {
            (0..n)
                .map(|s| window_at(t, s, cfg.window, true).map(|w| w.into_points()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let prior = BeliefState::uniform(k, false)?;

    let cells: Vec<(usize, usize)> = (0..cfg.noise_fractions.len())
        .flat_map(|l| (0..cfg.reps).map(move |r| (l, r)))
        .collect();
    let entropies = cells
        .par_iter()
        .map(|&(level, rep)| {
            let d = DistortionModel::noise(
                cfg.noise_fractions[level],
                cell_seed(cfg.base_seed, level, rep),
            );
            let u = distort(&targets[0], &d)?;
            let mut total = 0.0;
            for s in 0..n {
                let uw = window_at(&u, s, cfg.window, true)?;
                let scores = target_windows
                    .iter()
                    .map(|tw| cfg.measure.score(&uw, &tw[s]))
                    .collect::<Result<Vec<_>>>()?;
                total += bayes_update(&prior, &scores, &model)?.entropy_bits();
            }
            Ok(total / n as f64)
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok(cfg
        .noise_fractions
        .iter()
        .enumerate()
        .map(|(l, &f)| {
            let rows = &entropies[l * cfg.reps..(l + 1) * cfg.reps];
            NoiseSweepPoint {
                noise_fraction: f,
                mean_entropy_bits: rows.iter().sum::<f64>() / cfg.reps as f64,
                reps: cfg.reps,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_differ_per_cell() {
        let a = cell_seed(1, 0, 0);
        assert_ne!(a, cell_seed(1, 0, 1));
        assert_ne!(a, cell_seed(1, 1, 0));
        assert_ne!(a, cell_seed(2, 0, 0));
        assert_eq!(a, cell_seed(1, 0, 0));
    }

    #[test]
    fn zero_noise_matches_confusion_baseline() {
        let mut cfg = NoiseSweepConfig::new(5);
        cfg.n_targets = 4;
        cfg.noise_fractions = vec![0.0];
        cfg.reps = 2;
        let p = noise_entropy_sweep(&cfg).unwrap();
        // 90 deg apart on a 60-sample loop, only the followed target passes 0.8
        assert_eq!(p[0].mean_entropy_bits, 0.0);
    }

    #[test]
    fn bounded_by_uniform() {
        let mut cfg = NoiseSweepConfig::new(9);
        cfg.noise_fractions = vec![0.3, 2.0];
        cfg.reps = 2;
        for p in noise_entropy_sweep(&cfg).unwrap() {
            assert!(p.mean_entropy_bits <= 4.0 + 1e-12);
            assert!(p.mean_entropy_bits >= 0.0);
        }
    }
}
