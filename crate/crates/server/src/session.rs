use std::collections::VecDeque;
use std::f64::consts::TAU;

use mocorr::inference::{evaluate_windows, BeliefState};
use mocorr::trajectory::Point2;
use mocorr::{Direction, Measure};

use crate::protocol::{
    BeliefMsg, DecisionMsg, ErrorMsg, InputSample, Layout, OutMsg, SessionConfig, Shape,
};

pub const MAX_TARGETS: usize = 32;

fn config_error(message: impl Into<String>) -> ErrorMsg {
    ErrorMsg {
        code: "bad-config".into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone)]
enum Path {
    Circle {
        radius: f64,
    },
    Polygon {
        vertices: Vec<Point2>,
        cum: Vec<f64>,
    },
}

impl Path {
    fn new(shape: &Shape) -> Result<Self, ErrorMsg> {
        match shape {
            Shape::Circle { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(config_error(format!("radius must be > 0, got {radius}")));
                }
                Ok(Path::Circle { radius: *radius })
            }
            Shape::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(config_error("polygon needs at least 3 vertices"));
                }
                let vertices: Vec<Point2> =
                    vertices.iter().map(|v| Point2::new(v[0], v[1])).collect();
                if vertices.iter().any(|v| !v.is_finite()) {
                    return Err(config_error("polygon vertices must be finite"));
                }
                let m = vertices.len();
                let mut cum = vec![0.0];
                for i in 0..m {
                    let len = (vertices[(i + 1) % m] - vertices[i]).norm();
                    cum.push(cum[i] + len);
                }
                if !(cum[m] > 0.0) {
                    return Err(config_error("polygon has zero perimeter"));
                }
                Ok(Path::Polygon { vertices, cum })
            }
        }
    }

    /// Point at `fraction` of the way around the loop.
    fn at(&self, fraction: f64) -> Point2 {
        let f = fraction.rem_euclid(1.0);
        match self {
            Path::Circle { radius } => {
                let a = TAU * f;
                Point2::new(radius * a.cos(), radius * a.sin())
            }
            Path::Polygon { vertices, cum } => {
                let m = vertices.len();
                let s = f * cum[m];
                let e = (0..m).find(|&e| cum[e + 1] > s).unwrap_or(m - 1);
                let (a, b) = (vertices[e], vertices[(e + 1) % m]);
                let len = cum[e + 1] - cum[e];
                let g = if len > 0.0 { (s - cum[e]) / len } else { 0.0 };
                a + (b - a) * g
            }
        }
    }
}

/// One live selection session: moving targets on a shared clock and a
/// buffer of recent input samples.
#[derive(Debug, Clone)]
pub struct Session {
    cfg: SessionConfig,
    measure: Measure,
    path: Path,
    directions: Vec<Direction>,
    prior: BeliefState,
    hop: usize,
    inputs: VecDeque<Point2>,
    /// Target positions matched to each buffered input sample.
    matched: VecDeque<Vec<Point2>>,
    since_eval: usize,
    evaluated: bool,
    last_t: Option<f64>,
}

impl Session {
    pub fn new(cfg: SessionConfig) -> Result<Self, ErrorMsg> {
        let n = cfg.n_targets;
        if !(1..=MAX_TARGETS).contains(&n) {
            return Err(config_error(format!(
                "n_targets must be in [1, {MAX_TARGETS}], got {n}"
            )));
        }
        let path = Path::new(&cfg.shape)?;
        if !cfg.speed_deg_s.is_finite() {
            return Err(config_error("speed_deg_s must be finite"));
        }
        if !(cfg.sample_rate_hz.is_finite() && cfg.sample_rate_hz > 0.0) {
            return Err(config_error(format!(
                "sample_rate_hz must be > 0, got {}",
                cfg.sample_rate_hz
            )));
        }
        if !(cfg.h_threshold.is_finite() && cfg.h_threshold > 0.0) {
            return Err(config_error(format!(
                "h_threshold must be > 0, got {}",
                cfg.h_threshold
            )));
        }
        let directions = match cfg.directions.len() {
            0 => vec![Direction::Ccw; n],
            len if len == n => cfg.directions.clone(),
            len => {
                return Err(config_error(format!(
                    "{len} directions given for {n} targets"
                )))
            }
        };
        let measure = Measure::parse(&cfg.measure, cfg.sample_rate_hz)
            .map_err(|e| config_error(e.to_string()))?;
        if cfg.window < measure.min_len().max(2) {
            return Err(config_error(format!(
                "window must be at least {}, got {}",
                measure.min_len().max(2),
                cfg.window
            )));
        }
        cfg.model
            .validate()
            .map_err(|e| config_error(e.to_string()))?;
        let prior = BeliefState::uniform(n, true).map_err(|e| config_error(e.to_string()))?;
        Ok(Self {
            hop: (cfg.window / 2).max(1),
            measure,
            path,
            directions,
            prior,
            inputs: VecDeque::with_capacity(cfg.window),
            matched: VecDeque::with_capacity(cfg.window),
            since_eval: 0,
            evaluated: false,
            last_t: None,
            cfg,
        })
    }

    pub fn config(&self) -> &SessionConfig {
        &self.cfg
    }

    /// Samples between successive evaluations once the window is full.
    pub fn hop(&self) -> usize {
        self.hop
    }

    /// Exact target positions at session time `t` seconds.
    pub fn positions(&self, t: f64) -> Vec<Point2> {
        let n = self.cfg.n_targets as f64;
        self.directions
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let sign = if *d == Direction::Cw { -1.0 } else { 1.0 };
                let deg = 360.0 * i as f64 / n + sign * self.cfg.speed_deg_s * t;
                self.path.at(deg / 360.0)
            })
            .collect()
    }

    /// Target positions at the sample tick nearest to `t`.
    pub fn positions_at_tick(&self, t: f64) -> Vec<Point2> {
        let rate = self.cfg.sample_rate_hz;
        self.positions((t * rate).round() / rate)
    }

    pub fn layout(&self, t: f64) -> OutMsg {
        OutMsg::Layout(Layout::new(t, &self.positions(t)))
    }

    /// Restores the prior and clears every buffer.
    pub fn reset(&mut self) {
        self.clear_window();
        self.last_t = None;
    }

    fn clear_window(&mut self) {
        self.inputs.clear();
        self.matched.clear();
        self.since_eval = 0;
        self.evaluated = false;
    }

    /// Appends one sample. Emits a belief message at every window step and
    /// a decision message when one fires.
    pub fn ingest(&mut self, s: InputSample) -> Vec<OutMsg> {
        if !(s.t.is_finite() && s.x.is_finite() && s.y.is_finite()) {
            return vec![OutMsg::error("bad-input", "input fields must be finite")];
        }
        if let Some(last) = self.last_t {
            if s.t <= last {
                return vec![OutMsg::error(
                    "out-of-order",
                    format!("t={} is not after {last}; sample dropped", s.t),
                )];
            }
        }
        self.last_t = Some(s.t);

        let w = self.cfg.window;
        if self.inputs.len() == w {
            self.inputs.pop_front();
            self.matched.pop_front();
        }
        self.inputs.push_back(Point2::new(s.x, s.y));
        self.matched.push_back(self.positions_at_tick(s.t));
        self.since_eval += 1;

        if self.inputs.len() < w || (self.evaluated && self.since_eval < self.hop) {
            return Vec::new();
        }
        self.since_eval = 0;
        self.evaluated = true;
        self.evaluate()
    }

    fn evaluate(&mut self) -> Vec<OutMsg> {
        let u: Vec<Point2> = self.inputs.iter().copied().collect();
        let targets: Vec<Vec<Point2>> = (0..self.cfg.n_targets)
            .map(|i| self.matched.iter().map(|row| row[i]).collect())
            .collect();
        let ev = match evaluate_windows(
            &u,
            &targets,
            &self.measure,
            &self.cfg.model,
            &self.prior,
            self.cfg.h_threshold,
        ) {
            Ok(ev) => ev,
            Err(e) => return vec![OutMsg::error("internal", e.to_string())],
        };
        let mut out = vec![OutMsg::Belief(BeliefMsg {
            probs: ev.belief.probs().to_vec(),
            entropy_bits: ev.belief.entropy_bits(),
        })];
        if let Some(target) = ev.decision.selected() {
            out.push(OutMsg::Decision(DecisionMsg { target }));
            self.clear_window();
        }
        out
    }
}
