//! Statistical self-checks: lower-confidence-bound coverage of pessimistic
//! buyers and agreement of the analytic revenue function with sampling.

use rand::Rng;
use rayon::prelude::*;

use crate::buyers::{BuyerKind, BuyerModel};
use crate::error::{Error, Result};
use crate::market::{ExPostDistribution, ProblemInstance, TypeSet};
use crate::rng::{replicate_seed, stream_rng, SeedHasher, Stream};
use crate::sellers::{PolicySpec, TwoPhaseConfig};
use crate::sim::Episode;

/// Coverage experiment with exact lower-confidence-bound buyers.
#[derive(Debug, Clone)]
pub struct CoverageSetup {
    pub instance: ProblemInstance,
    pub policy: PolicySpec,
    pub two_phase: TwoPhaseConfig,
    pub eta: f64,
    pub episodes: u64,
    pub base_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub policy: String,
    pub episodes: u64,
    /// Episodes with at least one round where `LB_t > theta_{i_t}`.
    pub violating_episodes: u64,
    pub rate: f64,
    /// `eta + 3 sqrt(eta (1 - eta) / N)`.
    pub bound: f64,
    pub passed: bool,
}

/// Fraction of episodes in which some buyer's lower confidence bound exceeds
/// its ex-ante value.
pub fn validate_pessimism_coverage(setup: &CoverageSetup) -> Result<CoverageReport> {
    if setup.episodes == 0 {
        return Err(Error::InvalidParameter("episodes must be positive".into()));
    }
    let buyer = BuyerModel::new(BuyerKind::ExactLb, setup.eta)?;
    let name = setup.policy.to_string();
    let instance = &setup.instance;
    let theta = instance.theta();
    let violated: Vec<bool> = (0..setup.episodes)
        .into_par_iter()
        .map(|e| -> Result<bool> {
            let policy = setup.policy.build(instance, &setup.two_phase)?;
            let seed = replicate_seed(setup.base_seed, &name, instance.horizon(), e);
            let mut episode = Episode::new(instance, policy, buyer, seed);
            let mut any = false;
            while let Some(r) = episode.step()? {
                // exact_lb buyers use LB_t itself as the threshold
                any |= r.threshold > theta[r.type_index];
            }
            Ok(any)
        })
        .collect::<Result<_>>()?;
    let violating_episodes = violated.iter().filter(|&&v| v).count() as u64;
    let n = setup.episodes as f64;
    let rate = violating_episodes as f64 / n;
    let bound = setup.eta + 3.0 * (setup.eta * (1.0 - setup.eta) / n).sqrt();
    Ok(CoverageReport {
        policy: name,
        episodes: setup.episodes,
        violating_episodes,
        rate,
        bound,
        passed: rate <= bound,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevCheck {
    pub price: f64,
    pub set: Vec<usize>,
    pub analytic: f64,
    pub empirical: f64,
    /// `4 sqrt(p^2 v (1 - v) / n)` with `v` the analytic purchase probability.
    pub band: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevOracleReport {
    pub checks: Vec<RevCheck>,
    pub max_deviation: f64,
    pub passed: bool,
}

const REV_PAIRS: usize = 20;

/// Compares `rev(p, Q)` with the sample mean of `p 1(theta_i >= p, i in Q)`
/// over `n` type draws, for one `(p, Q)` pair.
pub fn check_rev(
    instance: &ProblemInstance,
    price: f64,
    set: &TypeSet,
    trials: u64,
    seed: u64,
) -> RevCheck {
    let mut rng = stream_rng(seed, Stream::Types);
    let theta = instance.theta();
    let hits = (0..trials)
        .filter(|_| {
            let i = instance.sample_type(&mut rng);
            set.contains(i) && theta[i] >= price
        })
        .count();
    let empirical = price * (hits as f64 / trials as f64);
    let analytic = instance.rev(price, set);
    let v = instance.purchase_probability(price, set).clamp(0.0, 1.0);
    // absolute slack covers rounding when v is exactly 0 or 1
    let band = 4.0 * (price * price * v * (1.0 - v) / trials as f64).sqrt() + 1e-12;
    RevCheck {
        price,
        set: set.to_vec(),
        analytic,
        empirical,
        band,
        passed: (analytic - empirical).abs() <= band,
    }
}

/// Runs [`check_rev`] on 20 random `(p, Q)` pairs. Half of the prices are
/// drawn uniformly and half are ex-ante values, which sit on the boundary of
/// the purchase indicator.
pub fn validate_rev_oracle(
    instance: &ProblemInstance,
    trials: u64,
    seed: u64,
) -> Result<RevOracleReport> {
    if trials < 10_000 {
        return Err(Error::InvalidParameter(format!(
            "at least 10^4 trials required, got {trials}"
        )));
    }
    let d = instance.d();
    let mut rng = stream_rng(seed, Stream::Auxiliary);
    let checks: Vec<RevCheck> = (0..REV_PAIRS)
        .map(|k| {
            let price = if k % 2 == 0 {
                rng.gen::<f64>()
            } else {
                instance.theta()[rng.gen_range(0..d)]
            };
            let mask: Vec<bool> = (0..d).map(|_| rng.gen_bool(0.6)).collect();
            let set = TypeSet::from_mask(mask);
            let check_seed = SeedHasher::new(seed).write_u64(k as u64).finish();
            check_rev(instance, price, &set, trials, check_seed)
        })
        .collect();
    let max_deviation = checks
        .iter()
        .map(|c| (c.analytic - c.empirical).abs())
        .fold(0.0, f64::max);
    let passed = checks.iter().all(|c| c.passed);
    Ok(RevOracleReport {
        checks,
        max_deviation,
        passed,
    })
}

/// Parameters of the built-in validation suite.
#[derive(Debug, Clone)]
pub struct SuiteParams {
    pub horizon: u64,
    pub eta: f64,
    pub episodes: u64,
    pub phase1_constant: f64,
    pub fixed_price: f64,
    pub rev_instances: u64,
    pub rev_trials: u64,
    pub seed: u64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            horizon: 300,
            eta: 0.1,
            episodes: 2000,
            phase1_constant: 0.5,
            fixed_price: 0.3,
            rev_instances: 10,
            rev_trials: 100_000,
            seed: 2024,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub coverage: Vec<CoverageReport>,
    pub rev_oracle: Vec<RevOracleReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.coverage.iter().all(|c| c.passed) && self.rev_oracle.iter().all(|r| r.passed)
    }
}

/// Three Bernoulli types with values 0.25, 0.5 and 0.75.
pub fn coverage_instance(horizon: u64) -> Result<ProblemInstance> {
    let theta = vec![0.25, 0.5, 0.75];
    let dists = theta
        .iter()
        .map(|&t| ExPostDistribution::bernoulli(t))
        .collect::<Result<Vec<_>>>()?;
    ProblemInstance::new(theta, vec![0.2, 0.3, 0.5], dists, horizon)
}

/// Coverage under the two-phase policy and a fixed price, then the revenue
/// oracle on random instances.
pub fn run_validation_suite(params: &SuiteParams) -> Result<SuiteReport> {
    let instance = coverage_instance(params.horizon)?;
    let two_phase = TwoPhaseConfig {
        lambda: None,
        phase1_constant: params.phase1_constant,
        eta: params.eta,
    };
    let coverage = [PolicySpec::TwoPhase, PolicySpec::Fixed(params.fixed_price)]
        .into_iter()
        .map(|policy| {
            validate_pessimism_coverage(&CoverageSetup {
                instance: instance.clone(),
                policy,
                two_phase,
                eta: params.eta,
                episodes: params.episodes,
                base_seed: params.seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rev_oracle = (0..params.rev_instances)
        .map(|k| {
            let seed = SeedHasher::new(params.seed)
                .write_str("rev")
                .write_u64(k)
                .finish();
            let d = 1 + (k as usize % 8);
            let inst = crate::instances::build_random_instance(d, seed, 1)?;
            validate_rev_oracle(&inst, params.rev_trials, seed)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport {
        coverage,
        rev_oracle,
    })
}
