use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{BeliefFlags, BeliefState};
use crate::similarity::VarianceComponents;

/// How a weight grows when its ratio is below the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WmsRule {
    /// `w + alpha * (v - ratio)`: smaller ratios give more evidence.
    #[default]
    Margin,
    /// `w + alpha * ratio`.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WmsConfig {
    pub alpha: f64,
    pub beta: f64,
    pub threshold: f64,
    #[serde(default)]
    pub rule: WmsRule,
}

impl Default for WmsConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.9,
            threshold: 0.5,
            rule: WmsRule::Margin,
        }
    }
}

impl WmsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::Config(format!(
                "alpha must be > 0, got {}",
                self.alpha
            )));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::Config(format!(
                "beta must be in (0, 1), got {}",
                self.beta
            )));
        }
        // thresholds of 1 or more are accepted: a ratio of 1 is "no effect"
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(Error::Config(format!(
                "threshold must be > 0, got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// One step of the stabilisation weight dynamics. Returns the new weights
/// and their normalisation as a belief without a null state.
pub fn wms_update(
    weights: &[f64],
    evidence: &[VarianceComponents],
    cfg: &WmsConfig,
) -> Result<(Vec<f64>, BeliefState)> {
    cfg.validate()?;
    if weights.is_empty() || weights.len() != evidence.len() {
        return Err(Error::invalid(format!(
            "{} weights for {} ratios",
            weights.len(),
            evidence.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::invalid(format!("weights must be positive, got {w}")));
    }
    if let Some(e) = evidence
        .iter()
        .find(|e| !(e.ratio.is_finite() && e.ratio >= 0.0))
    {
        return Err(Error::invalid(format!(
            "invalid variance ratio {}",
            e.ratio
        )));
    }

    let next: Vec<f64> = weights
        .iter()
        .zip(evidence)
        .map(|(&w, e)| {
            let w = if e.ratio < cfg.threshold {
                match cfg.rule {
                    WmsRule::Margin => w + cfg.alpha * (cfg.threshold - e.ratio),
                    WmsRule::Literal => w + cfg.alpha * e.ratio,
                }
            } else {
                cfg.beta * w
            };
            w.max(f64::MIN_POSITIVE)
        })
        .collect();
    let total: f64 = next.iter().sum();
    let probs = next.iter().map(|w| w / total).collect();
    Ok((
        next,
        BeliefState::from_normalized(probs, false, BeliefFlags::default()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratios(v: &[f64]) -> Vec<VarianceComponents> {
        v.iter()
            .map(|&r| VarianceComponents {
                sigma_s: r,
                sigma_f: 1.0,
                ratio: r,
            })
            .collect()
    }

    #[test]
    fn worked_example() {
        let cfg = WmsConfig {
            alpha: 1.0,
            beta: 0.5,
            threshold: 1.0,
            rule: WmsRule::Margin,
        };
        let (w, b) = wms_update(&[1.0, 1.0], &ratios(&[0.5, 2.0]), &cfg).unwrap();
        assert_eq!(w, vec![1.5, 0.5]);
        assert_eq!(b.probs(), &[0.75, 0.25]);
    }

    #[test]
    fn uniform_attenuation_keeps_belief() {
        let cfg = WmsConfig::default();
        let w0 = [0.2, 0.3, 0.5];
        let (w, b) = wms_update(&w0, &ratios(&[1.0, 2.0, 0.6]), &cfg).unwrap();
        for (a, b) in w.iter().zip(&w0) {
            assert!((a - 0.9 * b).abs() < 1e-15);
        }
        for (p, q) in b.probs().iter().zip(&w0) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn literal_rule() {
        let cfg = WmsConfig {
            rule: WmsRule::Literal,
            ..WmsConfig::default()
        };
        let (w, _) = wms_update(&[1.0, 1.0], &ratios(&[0.25, 0.0]), &cfg).unwrap();
        assert_eq!(w, vec![1.25, 1.0]);
    }

    #[test]
    fn converges_on_persistent_stabiliser() {
        let cfg = WmsConfig::default();
        let mut w = vec![1.0; 4];
        let r = ratios(&[0.0, 1.5, 1.5, 1.5]);
        let mut steps = None;
        for step in 1..=200 {
            let (nw, b) = wms_update(&w, &r, &cfg).unwrap();
            w = nw;
            if b.probs()[0] > 0.99 {
                steps = Some(step);
                break;
            }
        }
        assert!(steps.is_some());
    }

    #[test]
    fn rejects_bad_input() {
        let cfg = WmsConfig::default();
        assert!(wms_update(&[1.0, 0.0], &ratios(&[0.1, 0.1]), &cfg).is_err());
        assert!(wms_update(&[1.0], &ratios(&[0.1, 0.1]), &cfg).is_err());
        let bad = WmsConfig { beta: 1.0, ..cfg };
        assert!(wms_update(&[1.0], &ratios(&[0.1]), &bad).is_err());
    }

    #[test]
    fn weights_stay_positive_under_long_attenuation() {
        let cfg = WmsConfig {
            beta: 0.01,
            ..WmsConfig::default()
        };
        let mut w = vec![1.0, 1.0];
        for _ in 0..1000 {
            w = wms_update(&w, &ratios(&[5.0, 5.0]), &cfg).unwrap().0;
        }
        assert!(w.iter().all(|x| *x > 0.0));
    }
}
