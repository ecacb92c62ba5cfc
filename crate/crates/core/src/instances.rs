//! Instance families: the equal-value hard instance used for the lower bound,
//! well-separated easy instances with large minimum type probability, and
//! random instances for fuzzing.

use log::warn;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{ExPostDistribution, ProblemInstance};
use crate::rng::{stream_rng, Stream};

/// `T^(-1/3) (d-1)^(-2/3) ln(1/eta)^(1/3)`: the minimum type probability that
/// separates the `T^(2/3)` and `sqrt(T / q_min)` regimes. Also the mass of each
/// rare type in [`build_hard_instance`].
pub fn q_threshold(horizon: u64, d: usize, eta: f64) -> f64 {
    (horizon as f64).powf(-1.0 / 3.0)
        * ((d as f64) - 1.0).powf(-2.0 / 3.0)
        * (1.0 / eta).ln().powf(1.0 / 3.0)
}

/// All types share ex-ante value `1 - 1/sqrt(T)` with ex-post values uniform on
/// `[1 - 2/sqrt(T), 1]`; types `0..d-1` have mass `q = q_threshold(T, d, eta)`
/// and the last type takes the remaining `1 - q (d - 1)`.
pub fn build_hard_instance(horizon: u64, d: usize, eta: f64) -> Result<ProblemInstance> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "hard instance needs d >= 2, got {d}"
        )));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "hard instance needs eta in (0, 1), got {eta}"
        )));
    }
    if horizon < 4 {
        return Err(Error::InvalidParameter(format!(
            "hard instance needs T >= 4 so that 1 - 2/sqrt(T) >= 0, got {horizon}"
        )));
    }
    let q = q_threshold(horizon, d, eta);
    let rare_mass = q * (d as f64 - 1.0);
    if rare_mass >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "q (d - 1) = {rare_mass} >= 1 for T = {horizon}, d = {d}, eta = {eta}; increase T"
        )));
    }
    let ln_inv_eta = (1.0 / eta).ln();
    let needed = d as f64 * ln_inv_eta * ln_inv_eta * (d as f64).ln().powf(1.5);
    if (horizon as f64) < needed {
        warn!(
            "T = {horizon} is below d ln(1/eta)^2 ln(d)^1.5 = {needed:.1}; the lower-bound regime may not bind"
        );
    }
    let root = (horizon as f64).sqrt();
    let theta = 1.0 - 1.0 / root;
    let dist = ExPostDistribution::uniform((1.0 - 2.0 / root).max(0.0), 1.0)?;
    let mut probs = vec![q; d - 1];
    probs.push(1.0 - rare_mass);
    ProblemInstance::new(vec![theta; d], probs, vec![dist; d], horizon)
}

/// Well-separated instance with Bernoulli ex-post values.
///
/// One type, chosen by `seed`, has probability exactly `q_min`; the others
/// share the rest equally. Values are evenly spaced `gap` apart starting from
/// a seeded offset.
pub fn build_easy_instance(
    d: usize,
    q_min: f64,
    gap: f64,
    seed: u64,
    horizon: u64,
) -> Result<ProblemInstance> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    if !(q_min > 0.0 && q_min * d as f64 <= 1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "q_min = {q_min} infeasible for d = {d}"
        )));
    }
    if !(gap >= 0.0 && gap * d as f64 <= 1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "gap = {gap} infeasible for d = {d}"
        )));
    }
    let mut rng = stream_rng(seed, Stream::Auxiliary);
    let q = if d == 1 {
        if (q_min - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "a single type must have probability 1".into(),
            ));
        }
        vec![1.0]
    } else {
        let rare = rng.gen_range(0..d);
        let rest = (1.0 - q_min) / (d as f64 - 1.0);
        (0..d)
            .map(|i| if i == rare { q_min } else { rest })
            .collect()
    };
    let span = gap * (d as f64 - 1.0);
    let offset = rng.gen::<f64>() * (1.0 - span).max(0.0);
    let theta: Vec<f64> = (0..d).map(|i| (offset + gap * i as f64).min(1.0)).collect();
    let dists = theta
        .iter()
        .map(|&th| ExPostDistribution::bernoulli(th))
        .collect::<Result<Vec<_>>>()?;
    ProblemInstance::new(theta, q, dists, horizon)
}

/// Random instance for fuzzing: sorted uniform values, Dirichlet(1) type
/// probabilities and a mix of Bernoulli, symmetric-uniform and point-mass
/// ex-post distributions.
pub fn build_random_instance(d: usize, seed: u64, horizon: u64) -> Result<ProblemInstance> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    let mut rng = stream_rng(seed, Stream::Auxiliary);
    let mut theta: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
    theta.sort_by(f64::total_cmp);
    let weights: Vec<f64> = (0..d)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln() + 1e-3)
        .collect();
    let total: f64 = weights.iter().sum();
    let q: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let dists = theta
        .iter()
        .map(|&th| match rng.gen_range(0..3) {
            0 => ExPostDistribution::bernoulli(th),
            1 => {
                let half = rng.gen::<f64>() * th.min(1.0 - th);
                ExPostDistribution::uniform((th - half).max(0.0), (th + half).min(1.0))
            }
            _ => ExPostDistribution::point(th),
        })
        .collect::<Result<Vec<_>>>()?;
    ProblemInstance::new(theta, q, dists, horizon)
}

/// Instance family as written in experiment configs. The horizon comes from
/// the sweep, so the hard family is rebuilt for every `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSpec {
    Hard {
        d: usize,
        eta: f64,
    },
    Easy {
        d: usize,
        q_min: f64,
        gap: f64,
        #[serde(default)]
        seed: u64,
    },
    Random {
        d: usize,
        #[serde(default)]
        seed: u64,
    },
    Explicit {
        theta: Vec<f64>,
        q: Vec<f64>,
        value_dists: Vec<ExPostDistribution>,
    },
}

impl InstanceSpec {
    pub fn resolve(&self, horizon: u64) -> Result<ProblemInstance> {
        match self {
            Self::Hard { d, eta } => build_hard_instance(horizon, *d, *eta),
            Self::Easy {
                d,
                q_min,
                gap,
                seed,
            } => build_easy_instance(*d, *q_min, *gap, *seed, horizon),
            Self::Random { d, seed } => build_random_instance(*d, *seed, horizon),
            Self::Explicit {
                theta,
                q,
                value_dists,
            } => ProblemInstance::new(theta.clone(), q.clone(), value_dists.clone(), horizon),
        }
    }
}
