use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::similarity::{check_pair, SimilarityScore};
use crate::trajectory::Point2;

/// Signed frequency (Hz) of the strongest non-DC bin of the complex
/// sequence `x + iy`. Counter-clockwise motion is positive. `None` when no
/// non-DC bin carries energy.
pub fn dominant_frequency(w: &[Point2], sample_rate_hz: f64) -> Option<f64> {
    let n = w.len();
    let mut buf: Vec<Complex64> = w.iter().map(|p| Complex64::new(p.x, p.y)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let energy: f64 = buf.iter().map(|c| c.norm_sqr()).sum();
    let mut best = None::<(usize, f64)>;
    for (k, c) in buf.iter().enumerate().skip(1) {
        let m = c.norm_sqr();
        if best.is_none_or(|(_, bm)| m > bm) {
            best = Some((k, m));
        }
    }
    let (k, m) = best?;
    if m == 0.0 || m <= 1e-24 * energy {
        return None;
    }
    let k = k as f64;
    let n = n as f64;
    let signed = if k <= n / 2.0 { k } else { k - n };
    Some(signed * sample_rate_hz / n)
}

/// `1 - |f_u - f_t| / f_nyquist`, clamped to [0, 1].
pub fn dominant_frequency_similarity(
    u: &[Point2],
    t: &[Point2],
    sample_rate_hz: f64,
) -> Result<SimilarityScore> {
    check_pair(u, t, 8)?;
    if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
        return Err(Error::invalid(format!("bad sample rate {sample_rate_hz}")));
    }
    let (Some(fu), Some(ft)) = (
        dominant_frequency(u, sample_rate_hz),
        dominant_frequency(t, sample_rate_hz),
    ) else {
        return Ok(SimilarityScore::degenerate());
    };
    let nyquist = sample_rate_hz / 2.0;
    Ok(SimilarityScore::new(
        (1.0 - (fu - ft).abs() / nyquist).clamp(0.0, 1.0),
    ))
}
