//! Wire format: one JSON object per line, each carrying `"v": 1` and
//! exactly one message key. Unknown fields are ignored.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use mocorr::inference::DEFAULT_ENTROPY_THRESHOLD;
use mocorr::trajectory::Point2;
use mocorr::{Direction, LikelihoodModel};

pub const PROTOCOL_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Circle { radius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl Default for Shape {
    fn default() -> Self {
        Shape::Circle { radius: 1.0 }
    }
}

/// Session parameters. Omitted fields take the defaults below: eight
/// targets on a unit circle at 180 deg/s, sampled at 30 Hz, scored with
/// rotated correlation and a logistic likelihood.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionConfig {
    pub n_targets: usize,
    pub shape: Shape,
    pub speed_deg_s: f64,
    /// Empty means every target runs counter-clockwise.
    pub directions: Vec<Direction>,
    /// Measure name as accepted by `Measure::parse`.
    pub measure: String,
    pub model: LikelihoodModel,
    pub window: usize,
    pub h_threshold: f64,
    pub sample_rate_hz: f64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            n_targets: 8,
            shape: Shape::default(),
            speed_deg_s: 180.0,
            directions: Vec::new(),
            measure: "rotated_correlation".into(),
            model: LikelihoodModel::Logistic {
                lambda: 0.8,
                steepness: 20.0,
            },
            window: 30,
            h_threshold: DEFAULT_ENTROPY_THRESHOLD,
            sample_rate_hz: 30.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InMsg {
    Config(SessionConfig),
    Input(InputSample),
    Reset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub t: f64,
    pub positions: Vec<[f64; 2]>,
}

impl Layout {
    pub fn new(t: f64, points: &[Point2]) -> Self {
        Self {
            t,
            positions: points.iter().map(|p| [p.x, p.y]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefMsg {
    /// Null state first, then targets 1..=N.
    pub probs: Vec<f64>,
    pub entropy_bits: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionMsg {
    /// 1-based target number.
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorMsg {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutMsg {
    Layout(Layout),
    Belief(BeliefMsg),
    Decision(DecisionMsg),
    Error(ErrorMsg),
}

impl OutMsg {
    pub fn error(code: &str, message: impl Into<String>) -> Self {
        OutMsg::Error(ErrorMsg {
            code: code.into(),
            message: message.into(),
        })
    }

    /// Serialises to a single line without the trailing newline.
    pub fn to_line(&self) -> String {
        #[derive(Serialize)]
        struct Envelope<'a> {
            v: u64,
            #[serde(flatten)]
            body: &'a OutMsg,
        }
        serde_json::to_string(&Envelope {
            v: PROTOCOL_VERSION,
            body: self,
        })
        .expect("out messages always serialise")
    }

    pub fn from_line(line: &str) -> Result<Self, ErrorMsg> {
        let obj = envelope(line)?;
        let (key, body) = single_key(&obj, &["layout", "belief", "decision", "error"])?;
        let wrapped = serde_json::json!({ key: body });
        serde_json::from_value(wrapped).map_err(|e| bad("bad-message", e.to_string()))
    }
}

fn bad(code: &str, message: impl Into<String>) -> ErrorMsg {
    ErrorMsg {
        code: code.into(),
        message: message.into(),
    }
}

fn envelope(line: &str) -> Result<serde_json::Map<String, Value>, ErrorMsg> {
    let value: Value = serde_json::from_str(line).map_err(|e| bad("bad-json", e.to_string()))?;
    let Value::Object(obj) = value else {
        return Err(bad("bad-json", "message must be a JSON object"));
    };
    match obj.get("v").and_then(Value::as_u64) {
        Some(PROTOCOL_VERSION) => Ok(obj),
        Some(v) => Err(bad(
            "bad-version",
            format!("unsupported protocol version {v}"),
        )),
        None => Err(bad("bad-version", "missing protocol version \"v\"")),
    }
}

fn single_key<'a>(
    obj: &'a serde_json::Map<String, Value>,
    keys: &[&'a str],
) -> Result<(&'a str, &'a Value), ErrorMsg> {
    let found: Vec<&str> = keys
        .iter()
        .copied()
        .filter(|k| obj.contains_key(*k))
        .collect();
    match found.as_slice() {
        [k] => Ok((k, &obj[*k])),
        [] => Err(bad("bad-message", format!("expected one of {keys:?}"))),
        _ => Err(bad(
            "bad-message",
            format!("more than one message key: {found:?}"),
        )),
    }
}

impl InMsg {
    pub fn parse(line: &str) -> Result<Self, ErrorMsg> {
        let obj = envelope(line)?;
        let (key, body) = single_key(&obj, &["config", "input", "reset"])?;
        match key {
            "config" => serde_json::from_value(body.clone())
                .map(InMsg::Config)
                .map_err(|e| bad("bad-config", e.to_string())),
            "input" => serde_json::from_value(body.clone())
                .map(InMsg::Input)
                .map_err(|e| bad("bad-message", e.to_string())),
            _ => Ok(InMsg::Reset),
        }
    }

    pub fn to_line(&self) -> String {
        let body = match self {
            InMsg::Config(c) => serde_json::json!({ "config": c }),
            InMsg::Input(s) => serde_json::json!({ "input": s }),
            InMsg::Reset => serde_json::json!({ "reset": {} }),
        };
        let mut obj = body.as_object().cloned().unwrap_or_default();
        obj.insert("v".into(), PROTOCOL_VERSION.into());
        Value::Object(obj).to_string()
    }
}
