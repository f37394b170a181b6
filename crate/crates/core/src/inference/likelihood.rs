use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::kde::EmpiricalPdf;
use crate::similarity::SimilarityScore;

/// Default similarity threshold.
pub const DEFAULT_LAMBDA: f64 = 0.8;
/// Default logistic steepness.
pub const DEFAULT_STEEPNESS: f64 = 20.0;

/// Which hypothesis a score is evaluated under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// The user follows the target that produced the score.
    Follow,
    /// The user follows nothing.
    Null,
    /// The user follows some other target.
    Other,
}

/// Score densities under each role. `null` and `other` are optional so a
/// model can be fit from follow data alone, but bayes_update needs both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalModel {
    pub follow: EmpiricalPdf,
    pub null: Option<EmpiricalPdf>,
    pub other: Option<EmpiricalPdf>,
}

impl EmpiricalModel {
    pub fn pdf(&self, role: Role) -> Result<&EmpiricalPdf> {
        match role {
            Role::Follow => Ok(&self.follow),
            Role::Null => self
                .null
                .as_ref()
                .ok_or_else(|| Error::Config("empirical model has no null pdf".into())),
            Role::Other => self
                .other
                .as_ref()
                .ok_or_else(|| Error::Config("empirical model has no other-target pdf".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LikelihoodModel {
    Step { lambda: f64 },
    Logistic { lambda: f64, steepness: f64 },
    Empirical(EmpiricalModel),
}

impl Default for LikelihoodModel {
    fn default() -> Self {
        LikelihoodModel::Step {
            lambda: DEFAULT_LAMBDA,
        }
    }
}

impl LikelihoodModel {
    pub fn validate(&self) -> Result<()> {
        let check_lambda = |l: f64| {
            if (-1.0..=1.0).contains(&l) {
                Ok(())
            } else {
                Err(Error::Config(format!("lambda must be in [-1, 1], got {l}")))
            }
        };
        match self {
            LikelihoodModel::Step { lambda } => check_lambda(*lambda),
            LikelihoodModel::Logistic { lambda, steepness } => {
                check_lambda(*lambda)?;
                if steepness.is_finite() && *steepness > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "steepness must be > 0, got {steepness}"
                    )))
                }
            }
            LikelihoodModel::Empirical(_) => Ok(()),
        }
    }

    pub(crate) fn is_threshold(&self) -> bool {
        !matches!(self, LikelihoodModel::Empirical(_))
    }
}

fn logistic(r: f64, lambda: f64, k: f64) -> f64 {
    let z = -k * (r - lambda);
    // exp overflows to inf, which still gives the right limit of 0
    1.0 / (1.0 + z.exp())
}

/// Likelihood of score `r` under `role`. Threshold models give the follow
/// probability for `Follow` and its complement otherwise.
pub fn likelihood(model: &LikelihoodModel, r: SimilarityScore, role: Role) -> Result<f64> {
    if !r.value.is_finite() {
        return Err(Error::invalid(format!(
            "similarity score is not finite: {}",
            r.value
        )));
    }
    let follow = match model {
        LikelihoodModel::Step { lambda } => {
            if r.value > *lambda {
                1.0
            } else {
                0.0
            }
        }
        LikelihoodModel::Logistic { lambda, steepness } => logistic(r.value, *lambda, *steepness),
        LikelihoodModel::Empirical(m) => return Ok(m.pdf(role)?.density(r.value)),
    };
    Ok(match role {
        Role::Follow => follow,
        Role::Null | Role::Other => 1.0 - follow,
    })
}
