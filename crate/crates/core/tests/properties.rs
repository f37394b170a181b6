use proptest::prelude::*;

use mocorr::inference::{
    bayes_update, decide, entropy, BeliefState, LikelihoodModel, DEFAULT_ENTROPY_THRESHOLD,
};
use mocorr::similarity::{pearson_min_axis, rotated_correlation, Measure, SimilarityScore};
use mocorr::trajectory::Point2;

fn window(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Point2>> {
    prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), len)
        .prop_map(|v| v.into_iter().map(|(x, y)| Point2::new(x, y)).collect())
}

fn pair() -> impl Strategy<Value = (Vec<Point2>, Vec<Point2>)> {
    (8usize..40).prop_flat_map(|n| (window(n..n + 1), window(n..n + 1)))
}

fn probs(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-6..1.0f64, len).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

proptest! {
    #[test]
    fn scores_are_finite_and_bounded((u, t) in pair()) {
        for m in Measure::all(30.0) {
            let s = match m.score(&u, &t) {
                Ok(s) => s,
                // a flat disturbance window is rejected, not scored
                Err(e) => {
                    prop_assert!(matches!(m, Measure::VarianceRatio), "{}: {e}", m.name());
                    continue;
                }
            };
            prop_assert!(s.value.is_finite());
            if matches!(m, Measure::VarianceRatio) {
                prop_assert!(s.value >= 0.0);
            } else {
                prop_assert!(s.value >= -1.0 && s.value <= 1.0, "{} {}", m.name(), s.value);
            }
        }
    }

    #[test]
    fn rotated_correlation_follows_joint_rotation((u, t) in pair(), deg in 0.0..360.0f64) {
        let th = deg.to_radians();
        let rot = |w: &[Point2]| -> Vec<Point2> {
            w.iter().map(|p| p.rotated_about(Point2::ORIGIN, th)).collect()
        };
        let a = rotated_correlation(&u, &t).unwrap();
        let b = rotated_correlation(&rot(&u), &rot(&t)).unwrap();
        prop_assert!((a.value - b.value).abs() < 1e-6);
    }

    #[test]
    fn pearson_is_symmetric((u, t) in pair()) {
        let a = pearson_min_axis(&u, &t).unwrap();
        let b = pearson_min_axis(&t, &u).unwrap();
        prop_assert_eq!(a.value, b.value);
    }

    #[test]
    fn entropy_within_bounds(p in probs(1..40)) {
        let h = entropy(&p).unwrap();
        prop_assert!(h >= -1e-12);
        prop_assert!(h <= (p.len() as f64).log2() + 1e-9);
    }

    #[test]
    fn posterior_is_a_distribution(
        p in probs(2..12),
        raw in prop::collection::vec(-1.0..1.0f64, 11),
        lambda in -1.0..1.0f64,
        k in 0.5..100.0f64,
    ) {
        let prior = BeliefState::from_probs(p.clone(), true).unwrap();
        let r: Vec<SimilarityScore> =
            raw[..p.len() - 1].iter().map(|v| SimilarityScore::new(*v)).collect();
        for model in [
            LikelihoodModel::Step { lambda },
            LikelihoodModel::Logistic { lambda, steepness: k },
        ] {
            let post = bayes_update(&prior, &r, &model).unwrap();
            let sum: f64 = post.probs().iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
            prop_assert!(post.probs().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn decisions_never_pick_null(p in probs(2..10)) {
        let b = BeliefState::from_probs(p, true).unwrap();
        let d = decide(&b, DEFAULT_ENTROPY_THRESHOLD);
        if let Some(i) = d.selected() {
            prop_assert!(i >= 1 && i <= b.n_targets());
            prop_assert!(b.entropy_bits() < DEFAULT_ENTROPY_THRESHOLD);
        }
    }
}
