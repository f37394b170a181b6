use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{bayes_update, decide, BeliefState, Decision, LikelihoodModel};
use crate::similarity::{Measure, SimilarityScore};
use crate::trajectory::{window_at, Point2, Trajectory};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub window: usize,
    /// Samples between successive window starts.
    pub hop: usize,
    pub h_threshold: f64,
    pub prior: BeliefState,
    /// When set, each window's prior is the previous posterior mixed with
    /// uniform at this rate.
    pub carry_over: Option<f64>,
}

impl PipelineConfig {
    pub fn new(window: usize, h_threshold: f64, prior: BeliefState) -> Self {
        Self {
            window,
            hop: 1,
            h_threshold,
            prior,
            carry_over: None,
        }
    }
}

/// Result of scoring one input window against every target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowEvaluation {
    pub similarities: Vec<SimilarityScore>,
    pub belief: BeliefState,
    pub decision: Decision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineStep {
    pub window_start: usize,
    pub similarities: Vec<SimilarityScore>,
    pub belief: BeliefState,
    pub decision: Decision,
}

/// Scores `input` against each target window and updates `prior`.
pub fn evaluate_windows<T: AsRef<[Point2]>>(
    input: &[Point2],
    targets: &[T],
    measure: &Measure,
    model: &LikelihoodModel,
    prior: &BeliefState,
    h_threshold: f64,
) -> Result<WindowEvaluation> {
    let similarities = targets
        .iter()
        .map(|t| measure.score(input, t.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let belief = bayes_update(prior, &similarities, model)?;
    let decision = decide(&belief, h_threshold);
    Ok(WindowEvaluation {
        similarities,
        belief,
        decision,
    })
}

fn same_rate(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

/// Slides a window over `input` and infers the followed target at every
/// position. Target windows share the input window's start index and wrap
/// around closed targets.
pub fn run_pipeline(
    input: &Trajectory,
    targets: &[Trajectory],
    measure: &Measure,
    model: &LikelihoodModel,
    cfg: &PipelineConfig,
) -> Result<Vec<PipelineStep>> {
    if targets.is_empty() {
        return Err(Error::invalid("no targets"));
    }
    if cfg.prior.n_targets() != targets.len() {
        return Err(Error::invalid(format!(
            "prior covers {} targets, got {}",
            cfg.prior.n_targets(),
            targets.len()
        )));
    }
    if let Some(t) = targets
        .iter()
        .find(|t| !same_rate(t.sample_rate_hz(), input.sample_rate_hz()))
    {
        return Err(Error::invalid(format!(
            "sample rates differ: input {} Hz, target {} Hz",
            input.sample_rate_hz(),
            t.sample_rate_hz()
        )));
    }
    let w = cfg.window;
    if w < measure.min_len() || w > input.len() {
        return Err(Error::range(format!(
            "window {w} outside [{}, {}]",
            measure.min_len(),
            input.len()
        )));
    }
    if cfg.hop == 0 {
        return Err(Error::invalid("hop must be at least 1"));
    }
    if let Some(rate) = cfg.carry_over {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::invalid(format!(
                "carry-over rate must be in [0, 1], got {rate}"
            )));
        }
    }
    model.validate()?;

    let mut steps = Vec::new();
    let mut prior = cfg.prior.clone();
    for start in (0..=input.len() - w).step_by(cfg.hop) {
        let u = window_at(input, start, w, false)?;
        let tw = targets
            .iter()
            .map(|t| {
                let s = if t.is_closed() {
                    start % t.len()
                } else {
                    start
                };
                window_at(t, s, w, t.is_closed()).map(|w| w.into_points())
            })
            .collect::<Result<Vec<_>>>()?;
        let ev = evaluate_windows(&u, &tw, measure, model, &prior, cfg.h_threshold)?;
        if let Some(rate) = cfg.carry_over {
            prior = ev.belief.mixed_with_uniform(rate);
        }
        steps.push(PipelineStep {
            window_start: start,
            similarities: ev.similarities,
            belief: ev.belief,
            decision: ev.decision,
        });
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::Outcome;
    use crate::trajectory::{gen_circle, Direction};

    fn targets(n: usize) -> Vec<Trajectory> {
        (0..n)
            .map(|i| {
                let phase = 360.0 * i as f64 / n as f64;
                gen_circle(1.0, 60, phase, Direction::Ccw, Point2::ORIGIN, 30.0).unwrap()
            })
            .collect()
    }

    #[test]
    fn copy_of_target_selects_it_first() {
        let ts = targets(10);
        let prior = BeliefState::uniform(10, true).unwrap();
        let cfg = PipelineConfig::new(30, 0.5, prior);
        let steps = run_pipeline(
            &ts[0],
            &ts,
            &Measure::PearsonMinAxis,
            &LikelihoodModel::default(),
            &cfg,
        )
        .unwrap();
        assert_eq!(steps.len(), 31);
        assert_eq!(steps[0].decision.outcome, Outcome::Select(1));
        assert_eq!(steps[0].similarities[0].value, 1.0);
        // never picks a wrong target, even where a neighbour also passes
        assert!(steps
            .iter()
            .all(|s| s.decision.selected().is_none_or(|i| i == 1)));
    }

    #[test]
    fn hop_and_carry_over() {
        let ts = targets(4);
        let mut cfg = PipelineConfig::new(15, 0.5, BeliefState::uniform(4, true).unwrap());
        cfg.hop = 5;
        cfg.carry_over = Some(0.1);
        let steps = run_pipeline(
            &ts[2],
            &ts,
            &Measure::PearsonMinAxis,
            &LikelihoodModel::default(),
            &cfg,
        )
        .unwrap();
        let starts: Vec<usize> = steps.iter().map(|s| s.window_start).collect();
        assert_eq!(starts, vec![0, 5, 10, 15, 20, 25, 30, 35, 40, 45]);
        assert!(steps.iter().all(|s| s.decision.selected() == Some(3)));
    }

    #[test]
    fn rejects_mismatches() {
        let ts = targets(3);
        let m = Measure::PearsonMinAxis;
        let model = LikelihoodModel::default();
        let cfg = PipelineConfig::new(20, 0.5, BeliefState::uniform(2, true).unwrap());
        assert!(run_pipeline(&ts[0], &ts, &m, &model, &cfg).is_err());

        let cfg = PipelineConfig::new(61, 0.5, BeliefState::uniform(3, true).unwrap());
        assert!(matches!(
            run_pipeline(&ts[0], &ts, &m, &model, &cfg),
            Err(Error::Range(_))
        ));

        let slow = gen_circle(1.0, 60, 0.0, Direction::Ccw, Point2::ORIGIN, 60.0).unwrap();
        let cfg = PipelineConfig::new(20, 0.5, BeliefState::uniform(3, true).unwrap());
        assert!(run_pipeline(&slow, &ts, &m, &model, &cfg).is_err());
    }
}
