use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of the value a buyer experiences after purchasing.
///
/// Only analytic families are supported so that the mean can be checked
/// exactly against the type's ex-ante value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistSpec", into = "DistSpec")]
pub enum ExPostDistribution {
    Bernoulli { mean: f64 },
    Uniform { lo: f64, hi: f64 },
    Point { mass: f64 },
}

/// Serialized form: `{ kind = "uniform", params = [0.98, 1.0] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistSpec {
    pub kind: String,
    pub params: Vec<f64>,
}

fn unit(x: f64) -> bool {
    x.is_finite() && (0.0..=1.0).contains(&x)
}

impl ExPostDistribution {
    pub fn bernoulli(mean: f64) -> Result<Self> {
        Self::Bernoulli { mean }.validated()
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::Uniform { lo, hi }.validated()
    }

    pub fn point(mass: f64) -> Result<Self> {
        Self::Point { mass }.validated()
    }

    fn validated(self) -> Result<Self> {
        let ok = match self {
            Self::Bernoulli { mean } => unit(mean),
            Self::Uniform { lo, hi } => unit(lo) && unit(hi) && lo <= hi,
            Self::Point { mass } => unit(mass),
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidInstance(format!(
                "distribution {self:?} must have support inside [0, 1]"
            )))
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Bernoulli { mean } => mean,
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
            Self::Point { mass } => mass,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Bernoulli { .. } => (0.0, 1.0),
            Self::Uniform { lo, hi } => (lo, hi),
            Self::Point { mass } => (mass, mass),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Bernoulli { mean } => {
                if rng.gen::<f64>() < mean {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Uniform { lo, hi } => (lo + (hi - lo) * rng.gen::<f64>()).min(hi),
            Self::Point { mass } => mass,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Bernoulli { .. } => "bernoulli",
            Self::Uniform { .. } => "uniform",
            Self::Point { .. } => "point",
        }
    }
}

impl TryFrom<DistSpec> for ExPostDistribution {
    type Error = Error;

    fn try_from(spec: DistSpec) -> Result<Self> {
        let arity = |n: usize| {
            if spec.params.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidInstance(format!(
                    "distribution kind {:?} takes {n} parameter(s), got {}",
                    spec.kind,
                    spec.params.len()
                )))
            }
        };
        match spec.kind.as_str() {
            "bernoulli" => {
                arity(1)?;
                Self::bernoulli(spec.params[0])
            }
            "uniform" => {
                arity(2)?;
                Self::uniform(spec.params[0], spec.params[1])
            }
            "point" => {
                arity(1)?;
                Self::point(spec.params[0])
            }
            other => Err(Error::InvalidInstance(format!(
                "unknown distribution kind {other:?}"
            ))),
        }
    }
}

impl From<ExPostDistribution> for DistSpec {
    fn from(dist: ExPostDistribution) -> Self {
        let params = match dist {
            ExPostDistribution::Bernoulli { mean } => vec![mean],
            ExPostDistribution::Uniform { lo, hi } => vec![lo, hi],
            ExPostDistribution::Point { mass } => vec![mass],
        };
        DistSpec {
            kind: dist.kind().to_string(),
            params,
        }
    }
}
