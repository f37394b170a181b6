use crate::error::Result;
use crate::similarity::{centered_ss, check_pair, SimilarityScore};
use crate::trajectory::{rotate_points, Point2};

/// Pearson coefficient of one axis; `None` if either side has no variance.
fn pearson_axis(u: &[Point2], t: &[Point2], axis: fn(&Point2) -> f64) -> Option<f64> {
    let (mu, ssu) = centered_ss(u.iter().map(axis));
    let (mt, sst) = centered_ss(t.iter().map(axis));
    let (ssu, sst) = (ssu?, sst?);
    let cross: f64 = u
        .iter()
        .zip(t)
        .map(|(a, b)| (axis(a) - mu) * (axis(b) - mt))
        .sum();
    Some((cross / (ssu * sst).sqrt()).clamp(-1.0, 1.0))
}

/// Minimum of the per-axis Pearson coefficients. An axis without variance
/// in either window contributes 0 and marks the score degenerate.
pub fn pearson_min_axis(u: &[Point2], t: &[Point2]) -> Result<SimilarityScore> {
    check_pair(u, t, 3)?;
    let rx = pearson_axis(u, t, |p| p.x);
    let ry = pearson_axis(u, t, |p| p.y);
    Ok(SimilarityScore {
        value: rx.unwrap_or(0.0).min(ry.unwrap_or(0.0)),
        degenerate: rx.is_none() || ry.is_none(),
    })
}

/// Orientation in degrees, within (-90, 90], of the major principal axis of
/// the centred points. `None` when the points have no spread.
pub fn principal_axis_deg(points: &[Point2]) -> Option<f64> {
    let (_, sx) = centered_ss(points.iter().map(|p| p.x));
    let (_, sy) = centered_ss(points.iter().map(|p| p.y));
    if sx.is_none() && sy.is_none() {
        return None;
    }
    let c = crate::trajectory::centroid(points);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in points {
        let d = *p - c;
        sxx += d.x * d.x;
        syy += d.y * d.y;
        sxy += d.x * d.y;
    }
    Some(0.5 * (2.0 * sxy).atan2(sxx - syy).to_degrees())
}

/// Pearson min-axis after rotating both windows so the target's principal
/// axis lies at 45 degrees, which splits the target's variance evenly
/// between x and y.
pub fn rotated_correlation(u: &[Point2], t: &[Point2]) -> Result<SimilarityScore> {
    check_pair(u, t, 3)?;
    let Some(axis) = principal_axis_deg(t) else {
        return Ok(SimilarityScore::degenerate());
    };
    let theta = 45.0 - axis;
    let ur = rotate_points(u, theta);
    let tr = rotate_points(t, theta);
    pearson_min_axis(&ur, &tr)
}
