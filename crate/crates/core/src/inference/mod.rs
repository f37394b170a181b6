//! Belief over user states and entropy-gated selection.
//!
//! States are indexed with the null state ("not selecting anything") at
//! index 0 when present, followed by targets `1..=N`. Target ids are 1-based
//! everywhere in this module so that `probs()[i]` is the probability of
//! target `i` whenever the belief carries a null state.

mod bayes;
pub mod calibration;
mod kde;
mod likelihood;
mod pipeline;
mod wms;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bayes::{apply_likelihoods, bayes_update, state_likelihoods};
pub use kde::{fit_kde, silverman_bandwidth, Bandwidth, EmpiricalPdf, PdfLabel, MIN_KDE_SAMPLES};
pub use likelihood::{
    likelihood, EmpiricalModel, LikelihoodModel, Role, DEFAULT_LAMBDA, DEFAULT_STEEPNESS,
};
pub use pipeline::{
    evaluate_windows, run_pipeline, PipelineConfig, PipelineStep, WindowEvaluation,
};
pub use wms::{wms_update, WmsConfig, WmsRule};

/// Entropy (bits) below which a selection fires by default.
pub const DEFAULT_ENTROPY_THRESHOLD: f64 = 0.5;

/// Two probabilities closer than this count as tied.
pub const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserState {
    Null,
    /// 1-based target id.
    Target(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BeliefFlags {
    /// Every state had zero posterior mass; the belief fell back to uniform.
    pub degenerate: bool,
    /// The threshold-model null mass `1 - sum(p_i)` went negative and was clamped to 0.
    pub null_clamped: bool,
}

/// Probability vector over user states plus its entropy in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefState {
    probs: Vec<f64>,
    entropy_bits: f64,
    has_null: bool,
    #[serde(default)]
    flags: BeliefFlags,
}

impl BeliefState {
    /// Uniform belief over `n_targets` targets, plus the null state if requested.
    pub fn uniform(n_targets: usize, has_null: bool) -> Result<Self> {
        if n_targets == 0 {
            return Err(Error::invalid("belief needs at least one target"));
        }
        let n = n_targets + usize::from(has_null);
        Self::from_probs(vec![1.0 / n as f64; n], has_null)
    }

    /// Null state gets `p_null`; the rest is split evenly between targets.
    pub fn with_null_prior(n_targets: usize, p_null: f64) -> Result<Self> {
        if n_targets == 0 {
            return Err(Error::invalid("belief needs at least one target"));
        }
        if !(0.0..=1.0).contains(&p_null) {
            return Err(Error::invalid(format!(
                "null prior must be in [0, 1], got {p_null}"
            )));
        }
        let mut probs = vec![(1.0 - p_null) / n_targets as f64; n_targets + 1];
        probs[0] = p_null;
        Self::from_probs(probs, true)
    }

    /// Validates and renormalises `probs`. The sum must already be within
    /// 1e-6 of one.
    pub fn from_probs(probs: Vec<f64>, has_null: bool) -> Result<Self> {
        if probs.len() < 1 + usize::from(has_null) {
            return Err(Error::invalid("belief has no target states"));
        }
        entropy(&probs)?;
        let sum: f64 = probs.iter().sum();
        let probs = if (sum - 1.0).abs() <= 1e-12 {
            probs
        } else {
            probs.iter().map(|p| p / sum).collect()
        };
        Ok(Self::from_normalized(
            probs,
            has_null,
            BeliefFlags::default(),
        ))
    }

    pub(crate) fn from_normalized(probs: Vec<f64>, has_null: bool, flags: BeliefFlags) -> Self {
        let entropy_bits = entropy_unchecked(&probs);
        Self {
            probs,
            entropy_bits,
            has_null,
            flags,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn entropy_bits(&self) -> f64 {
        self.entropy_bits
    }

    pub fn has_null(&self) -> bool {
        self.has_null
    }

    pub fn flags(&self) -> BeliefFlags {
        self.flags
    }

    pub fn n_states(&self) -> usize {
        self.probs.len()
    }

    pub fn n_targets(&self) -> usize {
        self.probs.len() - usize::from(self.has_null)
    }

    pub fn state_at(&self, index: usize) -> UserState {
        if self.has_null {
            if index == 0 {
                UserState::Null
            } else {
                UserState::Target(index)
            }
        } else {
            UserState::Target(index + 1)
        }
    }

    pub fn index_of(&self, state: UserState) -> Option<usize> {
        let idx = match (state, self.has_null) {
            (UserState::Null, true) => 0,
            (UserState::Null, false) => return None,
            (UserState::Target(0), _) => return None,
            (UserState::Target(i), true) => i,
            (UserState::Target(i), false) => i - 1,
        };
        (idx < self.probs.len()).then_some(idx)
    }

    pub fn prob(&self, state: UserState) -> f64 {
        self.index_of(state).map_or(0.0, |i| self.probs[i])
    }

    /// Index of the most probable state and whether it is strictly maximal.
    pub fn argmax(&self) -> (usize, bool) {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        let top = self.probs[best];
        let strict = self
            .probs
            .iter()
            .enumerate()
            .all(|(i, &p)| i == best || p < top - TIE_EPSILON);
        (best, strict)
    }

    /// `(1 - rate) * self + rate * uniform`, keeping the flags clear.
    pub fn mixed_with_uniform(&self, rate: f64) -> Self {
        let u = 1.0 / self.probs.len() as f64;
        let probs = self
            .probs
            .iter()
            .map(|p| (1.0 - rate) * p + rate * u)
            .collect();
        Self::from_normalized(probs, self.has_null, BeliefFlags::default())
    }
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy(probs: &[f64]) -> Result<f64> {
    if probs.is_empty() {
        return Err(Error::invalid("empty probability vector"));
    }
    if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::invalid(format!("invalid probability {p}")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!("probabilities sum to {sum}, not 1")));
    }
    Ok(entropy_unchecked(probs))
}

fn entropy_unchecked(probs: &[f64]) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// 1-based target id.
    Select(usize),
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub outcome: Outcome,
    pub entropy_at_decision: f64,
    pub winning_prob: f64,
}

impl Decision {
    pub fn selected(&self) -> Option<usize> {
        match self.outcome {
            Outcome::Select(i) => Some(i),
            Outcome::Undecided => None,
        }
    }
}

/// Selects the most probable target once the entropy drops below
/// `h_threshold`. Never selects the null state and never breaks ties.
pub fn decide(belief: &BeliefState, h_threshold: f64) -> Decision {
    let (idx, strict) = belief.argmax();
    let winning_prob = belief.probs[idx];
    let outcome = match belief.state_at(idx) {
        UserState::Target(i) if strict && belief.entropy_bits < h_threshold => Outcome::Select(i),
        _ => Outcome::Undecided,
    };
    Decision {
        outcome,
        entropy_at_decision: belief.entropy_bits,
        winning_prob,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert!((entropy(&[1.0 / 16.0; 16]).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(entropy(&[0.0, 1.0, 0.0]).unwrap(), 0.0);
        let h7 = entropy(&[1.0 / 7.0; 7]).unwrap();
        assert!((h7 - 2.807).abs() < 5e-4);
        assert!(entropy(&[0.5, 0.6]).is_err());
        assert!(entropy(&[1.5, -0.5]).is_err());
    }

    #[test]
    fn decide_selects_confident_target() {
        let b = BeliefState::from_probs(vec![0.97, 0.01, 0.01, 0.01], false).unwrap();
        // -0.97 log2 0.97 - 3 * 0.01 log2 0.01
        let expected = -0.97 * 0.97_f64.log2() - 3.0 * 0.01 * 0.01_f64.log2();
        assert!((b.entropy_bits() - expected).abs() < 1e-12);
        assert!((b.entropy_bits() - 0.242).abs() < 1e-3);
        let d = decide(&b, 0.5);
        assert_eq!(d.outcome, Outcome::Select(1));
        assert_eq!(d.winning_prob, 0.97);
    }

    #[test]
    fn decide_undecided_cases() {
        let u = BeliefState::uniform(8, false).unwrap();
        assert_eq!(decide(&u, 2.9).outcome, Outcome::Undecided);

        let null_wins = BeliefState::from_probs(vec![0.98, 0.01, 0.01], true).unwrap();
        assert!(null_wins.entropy_bits() < 0.5);
        assert_eq!(decide(&null_wins, 0.5).outcome, Outcome::Undecided);

        let tie = BeliefState::from_probs(vec![0.0, 0.5, 0.5], true).unwrap();
        assert_eq!(decide(&tie, 10.0).outcome, Outcome::Undecided);
    }

    #[test]
    fn state_indexing() {
        let b = BeliefState::uniform(3, true).unwrap();
        assert_eq!(b.state_at(0), UserState::Null);
        assert_eq!(b.state_at(2), UserState::Target(2));
        assert_eq!(b.index_of(UserState::Target(3)), Some(3));
        assert_eq!(b.index_of(UserState::Target(4)), None);
        let nb = BeliefState::uniform(3, false).unwrap();
        assert_eq!(nb.state_at(0), UserState::Target(1));
        assert_eq!(nb.index_of(UserState::Null), None);
        assert_eq!(nb.n_targets(), 3);
    }

    #[test]
    fn null_prior() {
        let b = BeliefState::with_null_prior(4, 0.6).unwrap();
        assert_eq!(b.probs()[0], 0.6);
        assert!((b.probs()[1] - 0.1).abs() < 1e-15);
        assert!(BeliefState::with_null_prior(4, 1.2).is_err());
    }
}
