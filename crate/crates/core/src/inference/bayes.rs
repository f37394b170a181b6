use crate::error::{Error, Result};
use crate::inference::likelihood::{likelihood, LikelihoodModel, Role};
use crate::inference::{BeliefFlags, BeliefState};
use crate::similarity::SimilarityScore;

/// Per-state log-likelihoods for one window, in belief order (null first
/// when `has_null`). The flag reports a clamped threshold-model null mass.
///
/// Threshold models score target `i` by its follow probability alone and
/// give the null state whatever is left, `max(0, 1 - sum)`. Empirical
/// models use the naive-Bayes product over all scores.
pub fn state_likelihoods(
    model: &LikelihoodModel,
    scores: &[SimilarityScore],
    has_null: bool,
) -> Result<(Vec<f64>, bool)> {
    model.validate()?;
    let n = scores.len();
    if n == 0 {
        return Err(Error::invalid("no similarity scores"));
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut clamped = false;

    if model.is_threshold() {
        let g = scores
            .iter()
            .map(|&r| likelihood(model, r, Role::Follow))
            .collect::<Result<Vec<f64>>>()?;
        if has_null {
            let rest = 1.0 - g.iter().sum::<f64>();
            clamped = rest < 0.0;
            out.push(rest.max(0.0).ln());
        }
        out.extend(g.iter().map(|p| p.ln()));
        return Ok((out, clamped));
    }

    let LikelihoodModel::Empirical(m) = model else {
        unreachable!()
    };
    let mut log_follow = Vec::with_capacity(n);
    let mut log_other = Vec::with_capacity(n);
    for r in scores {
        if !r.value.is_finite() {
            return Err(Error::invalid(format!(
                "similarity score is not finite: {}",
                r.value
            )));
        }
        log_follow.push(m.follow.log_density(r.value));
        if n > 1 {
            log_other.push(m.pdf(Role::Other)?.log_density(r.value));
        }
    }
    if has_null {
        let null = m.pdf(Role::Null)?;
        out.push(scores.iter().map(|r| null.log_density(r.value)).sum());
    }
    let other_total: f64 = log_other.iter().sum();
    for i in 0..n {
        let others = if n > 1 {
            other_total - log_other[i]
        } else {
            0.0
        };
        out.push(log_follow[i] + others);
    }
    Ok((out, clamped))
}

/// Normalises `ln prior + ln likelihood`, falling back to uniform when no
/// state keeps any mass.
fn posterior_from_logs(prior: &BeliefState, log_lik: &[f64], null_clamped: bool) -> BeliefState {
    let logs: Vec<f64> = prior
        .probs()
        .iter()
        .zip(log_lik)
        .map(|(p, l)| {
            if *p > 0.0 {
                p.ln() + l
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut flags = BeliefFlags {
        degenerate: false,
        null_clamped,
    };
    if !m.is_finite() {
        flags.degenerate = true;
        let n = logs.len();
        return BeliefState::from_normalized(vec![1.0 / n as f64; n], prior.has_null(), flags);
    }
    let unnorm: Vec<f64> = logs.iter().map(|l| (l - m).exp()).collect();
    let total: f64 = unnorm.iter().sum();
    let probs = unnorm.into_iter().map(|u| u / total).collect();
    BeliefState::from_normalized(probs, prior.has_null(), flags)
}

/// Posterior over user states given one similarity score per target.
pub fn bayes_update(
    prior: &BeliefState,
    scores: &[SimilarityScore],
    model: &LikelihoodModel,
) -> Result<BeliefState> {
    if scores.len() != prior.n_targets() {
        return Err(Error::invalid(format!(
            "{} scores for a belief over {} targets",
            scores.len(),
            prior.n_targets()
        )));
    }
    let (log_lik, clamped) = state_likelihoods(model, scores, prior.has_null())?;
    Ok(posterior_from_logs(prior, &log_lik, clamped))
}

/// Posterior from explicit per-state likelihoods (belief order).
pub fn apply_likelihoods(prior: &BeliefState, lik: &[f64]) -> Result<BeliefState> {
    if lik.len() != prior.n_states() {
        return Err(Error::invalid(format!(
            "{} likelihoods for {} states",
            lik.len(),
            prior.n_states()
        )));
    }
    if let Some(l) = lik.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
        return Err(Error::invalid(format!("invalid likelihood {l}")));
    }
    let logs: Vec<f64> = lik.iter().map(|l| l.ln()).collect();
    Ok(posterior_from_logs(prior, &logs, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::kde::{fit_kde, Bandwidth, PdfLabel};
    use crate::inference::likelihood::EmpiricalModel;

    fn scores(v: &[f64]) -> Vec<SimilarityScore> {
        v.iter().map(|&x| SimilarityScore::new(x)).collect()
    }

    #[test]
    fn single_surviving_hypothesis() {
        let prior = BeliefState::uniform(4, true).unwrap();
        let post = apply_likelihoods(&prior, &[0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(post.probs(), &[0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(post.entropy_bits(), 0.0);
    }

    #[test]
    fn uniform_likelihood_is_identity() {
        let prior = BeliefState::from_probs(vec![0.1, 0.2, 0.3, 0.4], true).unwrap();
        let post = apply_likelihoods(&prior, &[0.37; 4]).unwrap();
        for (a, b) in post.probs().iter().zip(prior.probs()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn two_crossings_split_evenly() {
        let prior = BeliefState::uniform(3, true).unwrap();
        let model = LikelihoodModel::Step { lambda: 0.8 };
        let post = bayes_update(&prior, &scores(&[0.95, 0.9, 0.1]), &model).unwrap();
        assert!(post.flags().null_clamped);
        assert_eq!(post.probs(), &[0.0, 0.5, 0.5, 0.0]);
        assert!((post.entropy_bits() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nothing_above_threshold_is_null() {
        let prior = BeliefState::uniform(3, true).unwrap();
        let model = LikelihoodModel::Step { lambda: 0.8 };
        let post = bayes_update(&prior, &scores(&[0.1, 0.2, 0.3]), &model).unwrap();
        assert_eq!(post.probs()[0], 1.0);
    }

    #[test]
    fn all_zero_mass_falls_back_to_uniform() {
        let prior = BeliefState::uniform(3, false).unwrap();
        let model = LikelihoodModel::Step { lambda: 0.8 };
        let post = bayes_update(&prior, &scores(&[0.1, 0.2, 0.3]), &model).unwrap();
        assert!(post.flags().degenerate);
        assert!((post.entropy_bits() - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        let prior = BeliefState::uniform(3, true).unwrap();
        let model = LikelihoodModel::default();
        assert!(bayes_update(&prior, &scores(&[0.9, 0.1]), &model).is_err());
        assert!(apply_likelihoods(&prior, &[1.0; 3]).is_err());
    }

    fn model() -> EmpiricalModel {
        let follow: Vec<f64> = (0..20).map(|i| 0.8 + i as f64 * 0.01).collect();
        let other: Vec<f64> = (0..20).map(|i| -0.5 + i as f64 * 0.05).collect();
        let null: Vec<f64> = (0..20).map(|i| -0.3 + i as f64 * 0.03).collect();
        EmpiricalModel {
            follow: fit_kde(&follow, Bandwidth::Auto, PdfLabel::Follow).unwrap(),
            null: Some(fit_kde(&null, Bandwidth::Auto, PdfLabel::Null).unwrap()),
            other: Some(fit_kde(&other, Bandwidth::Auto, PdfLabel::Other).unwrap()),
        }
    }

    #[test]
    fn empirical_matches_direct_product() {
        let m = model();
        let r = [0.9, 0.1, -0.2];
        let prior = BeliefState::uniform(3, true).unwrap();
        let post =
            bayes_update(&prior, &scores(&r), &LikelihoodModel::Empirical(m.clone())).unwrap();

        let f = |x: f64| m.follow.density(x);
        let o = |x: f64| m.other.as_ref().unwrap().density(x);
        let nl = |x: f64| m.null.as_ref().unwrap().density(x);
        let mut direct = vec![nl(r[0]) * nl(r[1]) * nl(r[2])];
        direct.push(f(r[0]) * o(r[1]) * o(r[2]));
        direct.push(o(r[0]) * f(r[1]) * o(r[2]));
        direct.push(o(r[0]) * o(r[1]) * f(r[2]));
        let total: f64 = direct.iter().sum();
        for (a, b) in post.probs().iter().zip(&direct) {
            assert!((a - b / total).abs() < 1e-9);
        }
        assert!(post.probs()[1] > 0.9);
    }

    #[test]
    fn empirical_missing_pdf_is_config_error() {
        let mut m = model();
        m.null = None;
        let prior = BeliefState::uniform(2, true).unwrap();
        let err = bayes_update(&prior, &scores(&[0.9, 0.1]), &LikelihoodModel::Empirical(m));
        assert!(matches!(err, Err(Error::Config(_))));
    }
}
