use crate::error::{Error, Result};
use crate::similarity::{centered_ss, check_pair, SimilarityScore, VarianceComponents};
use crate::trajectory::{centroid, Point2};

/// `1 - SS(u - t) / SS(t)` over mean-centred windows, clamped to [-1, 1].
pub fn ss_ratio_2d(u: &[Point2], t: &[Point2]) -> Result<SimilarityScore> {
    check_pair(u, t, 3)?;
    let cu = centroid(u);
    let ct = centroid(t);
    let denom: f64 = t.iter().map(|p| (*p - ct).norm_sq()).sum();
    let scale: f64 = t.iter().map(|p| p.norm_sq()).sum();
    if denom == 0.0 || denom <= 1e-18 * scale {
        return Ok(SimilarityScore::degenerate());
    }
    let resid: f64 = u
        .iter()
        .zip(t)
        .map(|(a, b)| ((*a - cu) - (*b - ct)).norm_sq())
        .sum();
    Ok(SimilarityScore::new((1.0 - resid / denom).clamp(-1.0, 1.0)))
}

/// First differences scaled to unit RMS magnitude, or `None` without motion.
fn unit_rms_derivative(w: &[Point2]) -> Option<Vec<Point2>> {
    let d: Vec<Point2> = w.windows(2).map(|p| p[1] - p[0]).collect();
    let ms = d.iter().map(|p| p.norm_sq()).sum::<f64>() / d.len() as f64;
    let mag = w.iter().map(|p| p.norm_sq()).sum::<f64>() / w.len() as f64;
    if ms == 0.0 || ms <= 1e-24 * mag {
        return None;
    }
    let rms = ms.sqrt();
    Some(d.into_iter().map(|p| p * (1.0 / rms)).collect())
}

/// `1 / (1 + d)` where `d` is the mean Euclidean distance between the
/// RMS-normalised derivative sequences.
pub fn norm_euclidean_deriv(u: &[Point2], t: &[Point2]) -> Result<SimilarityScore> {
    check_pair(u, t, 4)?;
    let (Some(du), Some(dt)) = (unit_rms_derivative(u), unit_rms_derivative(t)) else {
        return Ok(SimilarityScore::degenerate());
    };
    let d = du
        .iter()
        .zip(&dt)
        .map(|(a, b)| (*a - *b).norm())
        .sum::<f64>()
        / du.len() as f64;
    Ok(SimilarityScore::new(1.0 / (1.0 + d)))
}

/// Least-squares slope of `u` against `t` for one axis.
fn slope_axis(u: &[Point2], t: &[Point2], axis: fn(&Point2) -> f64) -> Option<f64> {
    let (mt, sst) = centered_ss(t.iter().map(axis));
    let sst = sst?;
    let mu = u.iter().map(axis).sum::<f64>() / u.len() as f64;
    let cross: f64 = u
        .iter()
        .zip(t)
        .map(|(a, b)| (axis(a) - mu) * (axis(b) - mt))
        .sum();
    Some(cross / sst)
}

/// Per axis `1 - min(|b - 1|, 1)` for the regression slope `b` of `u` on
/// `t`; the smaller axis wins. A target axis without variance contributes 0.
pub fn regression_slope_similarity(u: &[Point2], t: &[Point2]) -> Result<SimilarityScore> {
    check_pair(u, t, 3)?;
    let sim = |b: Option<f64>| b.map(|b| 1.0 - (b - 1.0).abs().min(1.0));
    let sx = sim(slope_axis(u, t, |p| p.x));
    let sy = sim(slope_axis(u, t, |p| p.y));
    Ok(SimilarityScore {
        value: sx.unwrap_or(0.0).min(sy.unwrap_or(0.0)),
        degenerate: sx.is_none() || sy.is_none(),
    })
}

fn total_variance(w: &[Point2]) -> f64 {
    let c = centroid(w);
    w.iter().map(|p| (*p - c).norm_sq()).sum::<f64>() / w.len() as f64
}

/// Stabilisation evidence: variance of the summed motion over the variance
/// of the disturbance, both totalled over x and y.
pub fn variance_ratio(summed: &[Point2], disturbance: &[Point2]) -> Result<VarianceComponents> {
    check_pair(summed, disturbance, 3)?;
    let sigma_f = total_variance(disturbance);
    let mag = disturbance.iter().map(|p| p.norm_sq()).sum::<f64>() / disturbance.len() as f64;
    if !(sigma_f > 1e-18 * mag) || sigma_f == 0.0 {
        return Err(Error::invalid("disturbance window has zero variance"));
    }
    let sigma_s = total_variance(summed);
    Ok(VarianceComponents {
        sigma_s,
        sigma_f,
        ratio: sigma_s / sigma_f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{gen_circle, window_at, Direction};

    fn arc(start: usize, w: usize) -> Vec<Point2> {
        let c = gen_circle(1.0, 60, 0.0, Direction::Ccw, Point2::ORIGIN, 30.0).unwrap();
        window_at(&c, start, w, true).unwrap().into_points()
    }

    fn shift(w: &[Point2], by: Point2) -> Vec<Point2> {
        w.iter().map(|p| *p + by).collect()
    }

    fn scale(w: &[Point2], k: f64) -> Vec<Point2> {
        w.iter().map(|p| *p * k).collect()
    }

    #[test]
    fn ss_ratio_cases() {
        let w = arc(3, 20);
        assert_eq!(ss_ratio_2d(&w, &w).unwrap().value, 1.0);
        let moved = shift(&w, Point2::new(5.0, -3.0));
        assert!((ss_ratio_2d(&moved, &w).unwrap().value - 1.0).abs() < 1e-12);
        // doubling the input leaves a residual equal to the target itself
        assert!(ss_ratio_2d(&scale(&w, 2.0), &w).unwrap().value.abs() < 1e-12);
        let flat = vec![Point2::new(1.0, 1.0); 20];
        assert!(ss_ratio_2d(&w, &flat).unwrap().degenerate);
    }

    #[test]
    fn euclidean_deriv_cases() {
        let w = arc(10, 20);
        assert_eq!(norm_euclidean_deriv(&w, &w).unwrap().value, 1.0);
        let moved = shift(&w, Point2::new(-2.0, 7.0));
        assert!((norm_euclidean_deriv(&moved, &w).unwrap().value - 1.0).abs() < 1e-9);
        let big = scale(&w, 3.0);
        assert!((norm_euclidean_deriv(&big, &w).unwrap().value - 1.0).abs() < 1e-9);
        let still = vec![Point2::new(2.0, 2.0); 20];
        assert!(norm_euclidean_deriv(&still, &w).unwrap().degenerate);
    }

    #[test]
    fn slope_cases() {
        let w = arc(0, 20);
        assert!((regression_slope_similarity(&w, &w).unwrap().value - 1.0).abs() < 1e-12);
        let doubled = scale(&w, 2.0);
        assert!(
            regression_slope_similarity(&doubled, &w)
                .unwrap()
                .value
                .abs()
                < 1e-12
        );
        let moved = shift(&w, Point2::new(1.5, 1.5));
        assert!((regression_slope_similarity(&moved, &w).unwrap().value - 1.0).abs() < 1e-12);
        let edge: Vec<Point2> = (0..10).map(|i| Point2::new(0.0, i as f64)).collect();
        assert!(
            regression_slope_similarity(&edge, &edge)
                .unwrap()
                .degenerate
        );
    }

    #[test]
    fn variance_ratio_cases() {
        let dist = arc(5, 20);
        let still = vec![Point2::new(0.3, 0.3); 20];
        let c = variance_ratio(&still, &dist).unwrap();
        assert!(c.sigma_s < 1e-30);
        assert!(c.ratio < 1e-30);
        assert!((variance_ratio(&dist, &dist).unwrap().ratio - 1.0).abs() < 1e-12);
        // variance scales quadratically
        let c = variance_ratio(&scale(&dist, 2.0), &dist).unwrap();
        assert!((c.ratio - 4.0).abs() < 1e-12);
        assert!((c.ratio - c.sigma_s / c.sigma_f).abs() < 1e-12);
        assert!(variance_ratio(&dist, &still).is_err());
    }
}
