//! Target motions and simulated user input.
//!
//! Every generator here is a pure function of its arguments and seed. The
//! random generator is ChaCha8 seeded with `seed_from_u64`, so the same seed
//! reproduces the same bits on every platform.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 2D sample in display units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Rotates counter-clockwise about `center`.
    pub fn rotated_about(self, center: Point2, theta_rad: f64) -> Point2 {
        let (s, c) = theta_rad.sin_cos();
        let d = self - center;
        Point2::new(center.x + c * d.x - s * d.y, center.y + s * d.x + c * d.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Point2::new(x, y)
    }
}

/// Mean of a non-empty point slice.
pub fn centroid(points: &[Point2]) -> Point2 {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Point2::new(sx / n, sy / n)
}

/// Sense of travel around a closed path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Cw,
    #[default]
    Ccw,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Cw => -1.0,
            Direction::Ccw => 1.0,
        }
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cw" => Ok(Direction::Cw),
            "ccw" => Ok(Direction::Ccw),
            other => Err(Error::invalid(format!("unknown direction {other:?}"))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Cw => "cw",
            Direction::Ccw => "ccw",
        })
    }
}

/// A uniformly sampled sequence of 2D points.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<Point2>,
    sample_rate_hz: f64,
    closed: bool,
}

impl Trajectory {
    pub fn new(samples: Vec<Point2>, sample_rate_hz: f64, closed: bool) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid(format!(
                "trajectory needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        check_rate(sample_rate_hz)?;
        if let Some(i) = samples.iter().position(|p| !p.is_finite()) {
            return Err(Error::invalid(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            closed,
        })
    }

    pub fn samples(&self) -> &[Point2] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn centroid(&self) -> Point2 {
        centroid(&self.samples)
    }

    /// RMS distance of the samples from their centroid. Equals the radius for
    /// a uniformly sampled circle; noise levels are expressed relative to it.
    pub fn scale(&self) -> f64 {
        let c = self.centroid();
        let ms = self.samples.iter().map(|p| (*p - c).norm_sq()).sum::<f64>()
            / self.samples.len() as f64;
        ms.sqrt()
    }

    /// Sample at `index` taken modulo the length.
    pub fn wrapped(&self, index: isize) -> Point2 {
        let n = self.samples.len() as isize;
        self.samples[index.rem_euclid(n) as usize]
    }

    pub fn into_samples(self) -> Vec<Point2> {
        self.samples
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::invalid(format!(
            "sample rate must be finite and positive, got {rate}"
        )));
    }
    Ok(())
}

/// A contiguous slice of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    points: Vec<Point2>,
    start_index: usize,
}

impl Window {
    pub fn new(points: Vec<Point2>, start_index: usize) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid(format!(
                "window needs at least 2 points, got {}",
                points.len()
            )));
        }
        Ok(Self {
            points,
            start_index,
        })
    }

    /// A free-standing window not sliced from any trajectory.
    pub fn from_points(points: Vec<Point2>) -> Result<Self> {
        Self::new(points, 0)
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn start_index(&self) -> usize {
        self.start_index
    }

    pub fn into_points(self) -> Vec<Point2> {
        self.points
    }
}

impl Deref for Window {
    type Target = [Point2];

    fn deref(&self) -> &[Point2] {
        &self.points
    }
}

impl AsRef<[Point2]> for Window {
    fn as_ref(&self) -> &[Point2] {
        &self.points
    }
}

/// Linear channel from a target to the observed input: `U(t) = A·T(t − tau)
/// + translation + noise`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionModel {
    /// Row-major spatial transform.
    pub a: [[f64; 2]; 2],
    pub translation: Point2,
    /// Delay in samples.
    pub tau: usize,
    /// Per-axis noise SD as a fraction of the path scale (see [`Trajectory::scale`]).
    pub noise_sd: f64,
    pub seed: u64,
}

impl DistortionModel {
    pub const IDENTITY: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];

    /// Pure additive noise, no transform or delay.
    pub fn noise(noise_sd: f64, seed: u64) -> Self {
        Self {
            a: Self::IDENTITY,
            translation: Point2::ORIGIN,
            tau: 0,
            noise_sd,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.a.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("transform matrix must be finite"));
        }
        if !self.translation.is_finite() {
            return Err(Error::invalid("translation must be finite"));
        }
        if !(self.noise_sd.is_finite() && self.noise_sd >= 0.0) {
            return Err(Error::invalid(format!(
                "noise_sd must be finite and >= 0, got {}",
                self.noise_sd
            )));
        }
        Ok(())
    }

    fn apply(&self, p: Point2) -> Point2 {
        let a = &self.a;
        Point2::new(
            a[0][0] * p.x + a[0][1] * p.y + self.translation.x,
            a[1][0] * p.x + a[1][1] * p.y + self.translation.y,
        )
    }
}

/// Synthetic stand-in for natural, non-selecting behaviour: fixations with
/// small jitter separated by instantaneous saccades.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullBehaviorModel {
    /// Mean fixation length in samples (exponentially distributed, at least 1).
    pub fixation_duration_mean: f64,
    /// Fixation centres are drawn around the origin with this per-axis SD.
    pub saccade_amplitude_sd: f64,
    pub fixation_jitter_sd: f64,
    pub seed: u64,
}

impl NullBehaviorModel {
    /// Defaults for a unit-radius display: ~300 ms fixations at 30 Hz.
    pub fn with_seed(seed: u64) -> Self {
        Self {
            fixation_duration_mean: 9.0,
            saccade_amplitude_sd: 1.0,
            fixation_jitter_sd: 0.02,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !(ok(self.fixation_duration_mean)
            && ok(self.saccade_amplitude_sd)
            && ok(self.fixation_jitter_sd))
        {
            return Err(Error::invalid(
                "null-behaviour parameters must be finite and >= 0",
            ));
        }
        Ok(())
    }
}

/// `n` samples uniformly spaced in angle starting at `phase_deg`.
pub fn gen_circle(
    radius: f64,
    n: usize,
    phase_deg: f64,
    direction: Direction,
    center: Point2,
    sample_rate_hz: f64,
) -> Result<Trajectory> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::invalid(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if n < 4 {
        return Err(Error::invalid(format!("circle needs n >= 4, got {n}")));
    }
    if !phase_deg.is_finite() || !center.is_finite() {
        return Err(Error::invalid("phase and center must be finite"));
    }
    check_rate(sample_rate_hz)?;
    let step = direction.sign() * 2.0 * PI / n as f64;
    let phase = phase_deg.to_radians();
    let samples = (0..n)
        .map(|k| {
            let a = phase + step * k as f64;
            Point2::new(center.x + radius * a.cos(), center.y + radius * a.sin())
        })
        .collect();
    Trajectory::new(samples, sample_rate_hz, true)
}

/// `n` samples equally spaced by arc length around the closed polygon,
/// starting at the first vertex.
pub fn gen_polygon(vertices: &[Point2], n: usize, sample_rate_hz: f64) -> Result<Trajectory> {
    gen_polygon_phased(vertices, n, 0.0, sample_rate_hz)
}

/// Like [`gen_polygon`], but the first sample sits `phase_fraction` of the
/// perimeter past the first vertex.
pub fn gen_polygon_phased(
    vertices: &[Point2],
    n: usize,
    phase_fraction: f64,
    sample_rate_hz: f64,
) -> Result<Trajectory> {
    if vertices.len() < 3 {
        return Err(Error::invalid(format!(
            "polygon needs at least 3 vertices, got {}",
            vertices.len()
        )));
    }
    if vertices.iter().any(|v| !v.is_finite()) || !phase_fraction.is_finite() {
        return Err(Error::invalid("polygon vertices and phase must be finite"));
    }
    if n < 2 {
        return Err(Error::invalid(format!("polygon needs n >= 2, got {n}")));
    }
    check_rate(sample_rate_hz)?;

    let m = vertices.len();
    let mut cum = Vec::with_capacity(m + 1);
    cum.push(0.0);
    for i in 0..m {
        let len = (vertices[(i + 1) % m] - vertices[i]).norm();
        cum.push(cum[i] + len);
    }
    let perimeter = cum[m];
    if !(perimeter > 0.0 && perimeter.is_finite()) {
        return Err(Error::invalid("degenerate polygon: zero perimeter"));
    }

    let step = perimeter / n as f64;
    let offset = phase_fraction.rem_euclid(1.0) * perimeter;
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        let s = (offset + step * k as f64) % perimeter;
        // first edge whose end lies beyond s; zero-length edges are skipped
        let e = (0..m).find(|&e| cum[e + 1] > s).unwrap_or(m - 1);
        let a = vertices[e];
        let b = vertices[(e + 1) % m];
        let len = cum[e + 1] - cum[e];
        let f = if len > 0.0 { (s - cum[e]) / len } else { 0.0 };
        samples.push(a + (b - a) * f);
    }
    Trajectory::new(samples, sample_rate_hz, true)
}

/// Axis-aligned square with corners at `(0,0)` and `(side,side)`, listed
/// counter-clockwise.
pub fn square_vertices(side: f64) -> Vec<Point2> {
    vec![
        Point2::new(0.0, 0.0),
        Point2::new(side, 0.0),
        Point2::new(side, side),
        Point2::new(0.0, side),
    ]
}

/// Slice `w` samples starting at `start`. With `wrap`, indices are taken
/// modulo the length, which requires a closed trajectory.
pub fn window_at(traj: &Trajectory, start: usize, w: usize, wrap: bool) -> Result<Window> {
    let n = traj.len();
    if w < 2 {
        return Err(Error::invalid(format!(
            "window length must be >= 2, got {w}"
        )));
    }
    if wrap {
        if !traj.is_closed() {
            return Err(Error::invalid(
                "wrapping window requested on an open trajectory",
            ));
        }
        if w > n {
            return Err(Error::range(format!(
                "window length {w} exceeds trajectory length {n}"
            )));
        }
        let start = start % n;
        let points = (0..w).map(|i| traj.samples[(start + i) % n]).collect();
        Window::new(points, start)
    } else {
        if start.checked_add(w).is_none_or(|end| end > n) {
            return Err(Error::range(format!(
                "window [{start}, {start}+{w}) exceeds trajectory length {n}"
            )));
        }
        Window::new(traj.samples[start..start + w].to_vec(), start)
    }
}

/// Passes `traj` through the distortion channel.
///
/// Closed paths wrap the delayed index and keep their length. Open paths
/// lose the first `tau` output samples, which have no source sample.
pub fn distort(traj: &Trajectory, d: &DistortionModel) -> Result<Trajectory> {
    d.validate()?;
    let n = traj.len();
    if !traj.is_closed() && d.tau >= n {
        return Err(Error::invalid(format!(
            "delay {} must be shorter than the open trajectory ({n} samples)",
            d.tau
        )));
    }
    let sd = d.noise_sd * traj.scale();
    let mut rng = ChaCha8Rng::seed_from_u64(d.seed);
    let mut noise = || -> Point2 {
        let nx: f64 = rng.sample(StandardNormal);
        let ny: f64 = rng.sample(StandardNormal);
        Point2::new(nx * sd, ny * sd)
    };

    let samples: Vec<Point2> = if traj.is_closed() {
        (0..n)
            .map(|t| d.apply(traj.wrapped(t as isize - d.tau as isize)) + noise())
            .collect()
    } else {
        traj.samples[..n - d.tau]
            .iter()
            .map(|&p| d.apply(p) + noise())
            .collect()
    };
    Trajectory::new(samples, traj.sample_rate_hz, traj.closed)
}

/// Synthetic fixation/saccade trace of `n` samples.
pub fn gen_null_behavior(
    n: usize,
    model: &NullBehaviorModel,
    sample_rate_hz: f64,
) -> Result<Trajectory> {
    model.validate()?;
    if n < 2 {
        return Err(Error::invalid(format!("null trace needs n >= 2, got {n}")));
    }
    check_rate(sample_rate_hz)?;

    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let duration = if model.fixation_duration_mean > 0.0 {
        Some(
            Exp::new(1.0 / model.fixation_duration_mean)
                .map_err(|e| Error::invalid(e.to_string()))?,
        )
    } else {
        None
    };
    let gauss = |rng: &mut ChaCha8Rng, sd: f64| -> Point2 {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        Point2::new(x * sd, y * sd)
    };

    let mut samples = Vec::with_capacity(n);
    while samples.len() < n {
        let center = gauss(&mut rng, model.saccade_amplitude_sd);
        let len = match &duration {
            Some(d) => (d.sample(&mut rng).round() as usize).max(1),
            None => 1,
        };
        for _ in 0..len.min(n - samples.len()) {
            samples.push(center + gauss(&mut rng, model.fixation_jitter_sd));
        }
    }
    Trajectory::new(samples, sample_rate_hz, false)
}

/// First differences of consecutive points.
pub fn derivative(win: &Window) -> Result<Window> {
    if win.len() < 3 {
        return Err(Error::invalid(format!(
            "derivative needs a window of at least 3 points, got {}",
            win.len()
        )));
    }
    let d = win.windows(2).map(|p| p[1] - p[0]).collect();
    Window::new(d, win.start_index)
}

/// Rotates every point about the window centroid.
pub fn rotate_window(win: &Window, theta_deg: f64) -> Window {
    Window {
        points: rotate_points(&win.points, theta_deg),
        start_index: win.start_index,
    }
}

pub(crate) fn rotate_points(points: &[Point2], theta_deg: f64) -> Vec<Point2> {
    if theta_deg == 0.0 {
        return points.to_vec();
    }
    let c = centroid(points);
    let theta = theta_deg.to_radians();
    points.iter().map(|p| p.rotated_about(c, theta)).collect()
}
