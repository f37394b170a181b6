//! Worked examples checked against values computed independently here.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mocorr::analysis::entropy_profile;
use mocorr::analysis::ProfileMode;
use mocorr::inference::calibration::{fit_empirical, simulate_scores, CalibrationConfig};
use mocorr::inference::{
    bayes_update, decide, entropy, fit_kde, likelihood, run_pipeline, wms_update, Bandwidth,
    BeliefState, LikelihoodModel, Outcome, PdfLabel, PipelineConfig, Role, WmsConfig,
};
use mocorr::similarity::{
    dominant_frequency_similarity, variance_ratio, Measure, SimilarityScore, VarianceComponents,
};
use mocorr::trajectory::{
    derivative, gen_circle, gen_null_behavior, window_at, Direction, NullBehaviorModel, Point2,
    Window,
};

fn circle_points(freq_hz: f64, rate: f64, n: usize, phase: f64) -> Vec<Point2> {
    (0..n)
        .map(|i| {
            let a = TAU * freq_hz * i as f64 / rate + phase;
            Point2::new(a.cos(), a.sin())
        })
        .collect()
}

#[test]
fn derivative_inverts_cumulative_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let steps: Vec<Point2> = (0..rng.random_range(3..40))
            .map(|_| Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut acc = Point2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let mut pts = vec![acc];
        for s in &steps {
            acc = acc + *s;
            pts.push(acc);
        }
        let d = derivative(&Window::from_points(pts).unwrap()).unwrap();
        assert_eq!(d.points().len(), steps.len());
        for (a, b) in d.points().iter().zip(&steps) {
            assert!((*a - *b).norm() < 1e-12);
        }
    }
}

#[test]
fn dominant_frequency_bin_arithmetic() {
    // 60 samples at 30 Hz: bins are 0.5 Hz apart, Nyquist 15 Hz
    let one = circle_points(1.0, 30.0, 60, 0.0);
    let two = circle_points(2.0, 30.0, 60, 0.0);
    let s = dominant_frequency_similarity(&one, &two, 30.0).unwrap();
    assert!((s.value - (1.0 - 1.0 / 15.0)).abs() < 1e-12, "{}", s.value);

    let shifted = circle_points(1.0, 30.0, 60, 1.3);
    assert_eq!(
        dominant_frequency_similarity(&one, &shifted, 30.0)
            .unwrap()
            .value,
        1.0
    );
}

#[test]
fn variance_ratio_scales_quadratically() {
    let d = circle_points(0.5, 30.0, 40, 0.2);
    let doubled: Vec<Point2> = d.iter().map(|p| *p * 2.0).collect();
    let v = variance_ratio(&doubled, &d).unwrap();
    assert!((v.ratio - 4.0).abs() < 1e-12);
    assert!((variance_ratio(&d, &d).unwrap().ratio - 1.0).abs() < 1e-12);
}

#[test]
fn logistic_matches_step_on_grid() {
    let sharp = LikelihoodModel::Logistic {
        lambda: 0.8,
        steepness: 1e6,
    };
    let step = LikelihoodModel::Step { lambda: 0.8 };
    for k in 0..=2000 {
        let r = -1.0 + k as f64 * 1e-3;
        if (r - 0.8).abs() <= 0.01 {
            continue;
        }
        let r = SimilarityScore::new(r);
        let a = likelihood(&sharp, r, Role::Follow).unwrap();
        let b = likelihood(&step, r, Role::Follow).unwrap();
        assert!((a - b).abs() < 1e-3, "r={}", r.value);
    }
}

#[test]
fn kde_point_mass_closed_form() {
    let pdf = fit_kde(&[0.0; 10], Bandwidth::Fixed(0.1), PdfLabel::Follow).unwrap();
    let expected = 1.0 / (0.1 * (2.0 * PI).sqrt());
    assert!((pdf.density(0.0) - expected).abs() < 1e-12);
    assert!((pdf.density(0.0) - 3.9894).abs() < 1e-4);
}

#[test]
fn wms_worked_example() {
    let cfg = WmsConfig {
        alpha: 1.0,
        beta: 0.5,
        threshold: 1.0,
        ..WmsConfig::default()
    };
    let ev = [0.5, 2.0].map(|ratio| VarianceComponents {
        sigma_s: ratio,
        sigma_f: 1.0,
        ratio,
    });
    let (w, b) = wms_update(&[1.0, 1.0], &ev, &cfg).unwrap();
    assert!((w[0] - 1.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
    assert!((b.probs()[0] - 0.75).abs() < 1e-12 && (b.probs()[1] - 0.25).abs() < 1e-12);
}

#[test]
fn wms_converges_on_stabilised_target() {
    let ev: Vec<VarianceComponents> = (0..5)
        .map(|i| {
            let ratio = if i == 0 { 0.0 } else { 1.5 };
            VarianceComponents {
                sigma_s: ratio,
                sigma_f: 1.0,
                ratio,
            }
        })
        .collect();
    let mut w = vec![1.0; 5];
    let mut step = None;
    for k in 1..=200 {
        let (nw, b) = wms_update(&w, &ev, &WmsConfig::default()).unwrap();
        w = nw;
        if b.probs()[0] > 0.99 {
            step = Some(k);
            break;
        }
    }
    // weight 0 grows by 0.5 per step while the rest decay by 0.9:
    // first k with (1 + k/2) / (1 + k/2 + 4 * 0.9^k) > 0.99
    let oracle = (1..=200)
        .find(|&k| {
            let a = 1.0 + 0.5 * k as f64;
            a / (a + 4.0 * 0.9f64.powi(k)) > 0.99
        })
        .unwrap();
    assert_eq!(step, Some(oracle as usize));
}

#[test]
fn decision_worked_example() {
    let b = BeliefState::from_probs(vec![0.97, 0.01, 0.01, 0.01], false).unwrap();
    let h = -(0.97f64 * 0.97f64.log2() + 3.0 * 0.01 * 0.01f64.log2());
    assert!((b.entropy_bits() - h).abs() < 1e-12);
    assert!((h - 0.242).abs() < 1e-3);
    assert_eq!(decide(&b, 0.5).outcome, Outcome::Select(1));
    assert!((entropy(&[1.0 / 7.0; 7]).unwrap() - 2.807).abs() < 1e-3);
}

#[test]
fn two_crossings_split_the_posterior() {
    let prior = BeliefState::uniform(3, true).unwrap();
    let r = [0.9, 0.95, 0.1].map(SimilarityScore::new);
    let post = bayes_update(&prior, &r, &LikelihoodModel::Step { lambda: 0.8 }).unwrap();
    let p = post.probs();
    assert!((p[1] - 0.5).abs() < 1e-12 && (p[2] - 0.5).abs() < 1e-12);
    assert_eq!(decide(&post, 0.5).outcome, Outcome::Undecided);
}

#[test]
fn circle_profile_flatter_under_rotated_correlation() {
    let c = gen_circle(1.0, 120, 0.0, Direction::Ccw, Point2::ORIGIN, 30.0).unwrap();
    for w in [10, 20, 40] {
        let rot =
            entropy_profile(&c, w, &Measure::RotatedCorrelation, ProfileMode::LambdaFree).unwrap();
        let pear =
            entropy_profile(&c, w, &Measure::PearsonMinAxis, ProfileMode::LambdaFree).unwrap();
        assert!(rot.std_dev() < pear.std_dev(), "w={w}");
    }
}

#[test]
fn null_scores_sit_below_follow_scores() {
    let target = gen_circle(1.0, 60, 0.0, Direction::Ccw, Point2::ORIGIN, 30.0).unwrap();
    let null = gen_null_behavior(3000, &NullBehaviorModel::with_seed(5), 30.0).unwrap();
    let w = 30;
    let m = Measure::PearsonMinAxis;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut null_scores = Vec::new();
    let mut follow_scores = Vec::new();
    for k in 0..200 {
        let s = rng.random_range(0..=null.len() - w);
        let u = window_at(&null, s, w, false).unwrap();
        let t = window_at(&target, k % 60, w, true).unwrap();
        null_scores.push(m.score(u.points(), t.points()).unwrap().value);
        let noisy: Vec<Point2> = t
            .points()
            .iter()
            .map(|p| *p + Point2::new(rng.random_range(-0.15..0.15), rng.random_range(-0.15..0.15)))
            .collect();
        follow_scores.push(m.score(&noisy, t.points()).unwrap().value);
    }
    let median = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    let (mn, mf) = (median(null_scores.clone()), median(follow_scores));
    assert!(mf > 0.8 && mn < 0.3, "follow {mf}, null {mn}");
    let high = null_scores.iter().filter(|v| **v > 0.8).count();
    assert!(high < 20, "{high} null windows above 0.8");
}

#[test]
fn null_behaviour_rarely_triggers_selection() {
    let targets: Vec<_> = (0..8)
        .map(|i| {
            gen_circle(
                1.0,
                60,
                45.0 * i as f64,
                Direction::Ccw,
                Point2::ORIGIN,
                30.0,
            )
            .unwrap()
        })
        .collect();
    let m = Measure::RotatedCorrelation;
    let w = 30;
    let model = LikelihoodModel::Empirical(
        fit_empirical(&targets, &CalibrationConfig::new(m, w, 11), Bandwidth::Auto).unwrap(),
    );
    let cfg = PipelineConfig::new(w, 0.5, BeliefState::uniform(8, true).unwrap());
    let mut quiet = 0;
    for seed in 0..100 {
        let null =
            gen_null_behavior(300, &NullBehaviorModel::with_seed(1000 + seed), 30.0).unwrap();
        let steps = run_pipeline(&null, &targets, &m, &model, &cfg).unwrap();
        if steps.iter().all(|s| s.decision.selected().is_none()) {
            quiet += 1;
        }
    }
    assert!(quiet >= 95, "only {quiet}/100 null traces stayed undecided");
}

#[test]
fn calibrated_densities_separate_follow_from_null() {
    let targets = vec![gen_circle(1.0, 60, 0.0, Direction::Ccw, Point2::ORIGIN, 30.0).unwrap()];
    let s = simulate_scores(
        &targets,
        &CalibrationConfig::new(Measure::PearsonMinAxis, 30, 2),
    )
    .unwrap();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!(mean(&s.follow) > mean(&s.null) + 0.3);
}
