//! Two-phase successive-elimination pricing.
//!
//! Phase 1 gives the item away for `t_lambda` rounds to sample the type
//! distribution and keeps the types seen in at least a `3 lambda / 4`
//! fraction of those rounds (the retained set `Q`). Phase 2 prices low enough
//! that every still-active type buys, estimates `rev(theta_i, Q)` for each
//! active type from phase-2 sales, and drops the low types whose upper
//! confidence bound falls below the best lower confidence bound.
//!
//! Because types are indexed in order of ex-ante value, the active set is
//! always a suffix of `Q` and is stored as a cutoff position into it.

use crate::buyers::hoeffding_lower_bound;
use crate::error::{Error, Result};
use crate::market::{ProblemInstance, ReviewLog, TypeSet};

use super::{RoundOutcome, SellerPolicy};

pub const DEFAULT_PHASE1_CONSTANT: f64 = 32.0;

// Absorbs rounding in `count / t_lambda >= 3 lambda / 4` at exact boundaries.
const THRESHOLD_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhaseConfig {
    /// Elimination parameter; `None` selects `d^(-2/3) T^(-1/3)`.
    pub lambda: Option<f64>,
    pub phase1_constant: f64,
    /// Pessimism level assumed for the buyers.
    pub eta: f64,
}

impl Default for TwoPhaseConfig {
    fn default() -> Self {
        Self {
            lambda: None,
            phase1_constant: DEFAULT_PHASE1_CONSTANT,
            eta: 0.1,
        }
    }
}

/// `d^(-2/3) T^(-1/3)`.
pub fn auto_lambda(d: usize, horizon: u64) -> f64 {
    (d as f64).powf(-2.0 / 3.0) * (horizon as f64).powf(-1.0 / 3.0)
}

/// Phase-1 length `ceil(c ln(d T^2) / lambda) + 1`, capped at `T`.
pub fn phase1_length(d: usize, horizon: u64, lambda: f64, phase1_constant: f64) -> u64 {
    let d = d as f64;
    let big_t = horizon as f64;
    let raw = (phase1_constant * (d * big_t * big_t).ln() / lambda).ceil();
    if !raw.is_finite() || raw >= big_t {
        return horizon;
    }
    (raw.max(0.0) as u64 + 1).min(horizon)
}

/// Types whose phase-1 frequency `counts[i] / t_lambda` is at least `3 lambda / 4`.
pub fn type_elimination(counts: &[u64], t_lambda: u64, lambda: f64) -> TypeSet {
    let threshold = 0.75 * lambda;
    let mask = counts
        .iter()
        .map(|&c| c as f64 / t_lambda as f64 >= threshold - THRESHOLD_EPS)
        .collect();
    TypeSet::from_mask(mask)
}

/// Position in `upper` of the first entry with `upper[k] >= max(lower)`.
///
/// Both slices describe the active types in increasing index order. Returns 0
/// for an empty active set.
pub fn elimination_cutoff(upper: &[f64], lower: &[f64]) -> usize {
    let best_lower = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    upper.iter().position(|&u| u >= best_lower).unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevenueEstimate {
    /// Estimate of `rev(theta_i, Q)` from phase-2 rounds.
    pub mean: f64,
    pub upper: f64,
    pub lower: f64,
}

/// Record of the elimination step performed in the most recent phase-2 update.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationStep {
    pub t: u64,
    pub rho: f64,
    /// Active types before elimination, in increasing order.
    pub active_before: Vec<usize>,
    /// Estimates aligned with `active_before`.
    pub estimates: Vec<RevenueEstimate>,
    /// Smallest surviving type, if any type was active.
    pub cutoff_type: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct TwoPhasePolicy {
    theta: Vec<f64>,
    horizon: u64,
    eta: f64,
    lambda: f64,
    phase1_constant: f64,
    t_lambda: u64,
    last_round: u64,
    phase1_counts: Vec<u64>,
    /// `Q` in increasing index order; set once phase 1 ends.
    retained: Option<Vec<usize>>,
    in_retained: Vec<bool>,
    /// Active set is `retained[cutoff..]`.
    cutoff: usize,
    /// Per type: phase-2 sales to a retained type with value at least `theta[i]`.
    phase2_hits: Vec<u64>,
    rounds_in_phase2: u64,
    last_step: Option<EliminationStep>,
}

impl TwoPhasePolicy {
    pub fn new(theta: Vec<f64>, horizon: u64, config: &TwoPhaseConfig) -> Result<Self> {
        let d = theta.len();
        if d == 0 {
            return Err(Error::InvalidParameter(
                "at least one type is required".into(),
            ));
        }
        if theta.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter(
                "theta must be sorted non-decreasing".into(),
            ));
        }
        if horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be positive".into()));
        }
        if !(config.eta > 0.0 && config.eta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eta must lie in (0, 1], got {}",
                config.eta
            )));
        }
        let lambda = config.lambda.unwrap_or_else(|| auto_lambda(d, horizon));
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must lie in (0, 1], got {lambda}"
            )));
        }
        if !(config.phase1_constant.is_finite() && config.phase1_constant >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "phase-1 constant must be >= 0, got {}",
                config.phase1_constant
            )));
        }
        let t_lambda = phase1_length(d, horizon, lambda, config.phase1_constant);
        Ok(Self {
            theta,
            horizon,
            eta: config.eta,
            lambda,
            phase1_constant: config.phase1_constant,
            t_lambda,
            last_round: 0,
            phase1_counts: vec![0; d],
            retained: None,
            in_retained: vec![false; d],
            cutoff: 0,
            phase2_hits: vec![0; d],
            rounds_in_phase2: 0,
            last_step: None,
        })
    }

    pub fn for_instance(instance: &ProblemInstance, config: &TwoPhaseConfig) -> Result<Self> {
        Self::new(instance.theta().to_vec(), instance.horizon(), config)
    }

    pub fn d(&self) -> usize {
        self.theta.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn phase1_constant(&self) -> f64 {
        self.phase1_constant
    }

    pub fn t_lambda(&self) -> u64 {
        self.t_lambda
    }

    pub fn phase1_counts(&self) -> &[u64] {
        &self.phase1_counts
    }

    pub fn rounds_in_phase2(&self) -> u64 {
        self.rounds_in_phase2
    }

    pub fn phase2_hits(&self) -> &[u64] {
        &self.phase2_hits
    }

    /// Retained set `Q`, available once phase 1 is over.
    pub fn retained(&self) -> Option<TypeSet> {
        self.retained
            .as_ref()
            .map(|r| TypeSet::from_indices(self.d(), r.iter().copied()).expect("indices < d"))
    }

    /// Active set for the next round's price, available once phase 1 is over.
    pub fn active(&self) -> Option<&[usize]> {
        self.retained.as_deref().map(|r| &r[self.cutoff..])
    }

    pub fn last_elimination(&self) -> Option<&EliminationStep> {
        self.last_step.as_ref()
    }

    /// `sqrt(ln(d T^2) / (2 (t - t_lambda)))`, or `None` before phase 2.
    pub fn rho(&self) -> Option<f64> {
        (self.rounds_in_phase2 > 0).then(|| {
            let d = self.d() as f64;
            let big_t = self.horizon as f64;
            ((d * big_t * big_t).ln() / (2.0 * self.rounds_in_phase2 as f64)).sqrt()
        })
    }

    /// Current estimate of `rev(theta_i, Q)` with its confidence bounds.
    pub fn estimate(&self, i: usize) -> Option<RevenueEstimate> {
        let rho = self.rho()?;
        let hits = *self.phase2_hits.get(i)?;
        let mean = self.theta[i] * hits as f64 / self.rounds_in_phase2 as f64;
        Some(RevenueEstimate {
            mean,
            upper: mean + rho,
            lower: mean - rho,
        })
    }

    /// Seller-side bound `LB_it` with confidence term `sqrt(ln(T / eta) / (2n))`.
    pub fn seller_lb(&self, reviews: &ReviewLog, i: usize) -> f64 {
        let view = reviews.of_type(i);
        hoeffding_lower_bound(
            view.sum(),
            view.len(),
            (self.horizon as f64 / self.eta).ln(),
        )
    }

    fn finish_phase1(&mut self) {
        let q_set = type_elimination(&self.phase1_counts, self.t_lambda, self.lambda);
        let retained = q_set.to_vec();
        for &i in &retained {
            self.in_retained[i] = true;
        }
        self.retained = Some(retained);
        self.cutoff = 0;
    }

    fn phase2_update(&mut self, t: u64, outcome: &RoundOutcome) {
        self.rounds_in_phase2 += 1;
        if let Some(j) = outcome.revealed_type {
            if self.in_retained[j] {
                let value = self.theta[j];
                let retained = self.retained.as_deref().unwrap_or_default();
                for &i in retained {
                    if value >= self.theta[i] {
                        self.phase2_hits[i] += 1;
                    }
                }
            }
        }

        let rho = self.rho().expect("phase 2 has at least one round");
        let active: Vec<usize> = self.active().unwrap_or_default().to_vec();
        let estimates: Vec<RevenueEstimate> = active
            .iter()
            .map(|&i| self.estimate(i).expect("phase 2 estimate"))
            .collect();
        let upper: Vec<f64> = estimates.iter().map(|e| e.upper).collect();
        let lower: Vec<f64> = estimates.iter().map(|e| e.lower).collect();
        let shift = elimination_cutoff(&upper, &lower);
        let cutoff_type = active.get(shift).copied();
        self.cutoff += shift;
        self.last_step = Some(EliminationStep {
            t,
            rho,
            active_before: active,
            estimates,
            cutoff_type,
        });
    }
}

impl SellerPolicy for TwoPhasePolicy {
    fn choose_price(&mut self, t: u64, reviews: &ReviewLog) -> f64 {
        if t <= self.t_lambda {
            return 0.0;
        }
        let Some(active) = self.active() else {
            return 0.0;
        };
        if active.is_empty() {
            // nothing left to target
            return 1.0;
        }
        active
            .iter()
            .map(|&i| self.theta[i].min(self.seller_lb(reviews, i)))
            .fold(f64::INFINITY, f64::min)
    }

    fn update(&mut self, t: u64, outcome: &RoundOutcome) -> Result<()> {
        outcome.check()?;
        if t != self.last_round + 1 || t > self.horizon {
            return Err(Error::InconsistentOutcome(format!(
                "round {t} reported after round {} of {}",
                self.last_round, self.horizon
            )));
        }
        if let Some(j) = outcome.revealed_type {
            if j >= self.d() {
                return Err(Error::TypeOutOfRange {
                    index: j,
                    d: self.d(),
                });
            }
        }
        self.last_round = t;
        if t <= self.t_lambda {
            if let Some(j) = outcome.revealed_type {
                self.phase1_counts[j] += 1;
            }
            if t == self.t_lambda {
                self.finish_phase1();
            }
        } else {
            self.phase2_update(t, outcome);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase1_length_with_auto_lambda() {
        let lambda = auto_lambda(4, 1_000_000);
        assert!((lambda - 0.003_968_502_629_920_5).abs() < 1e-15);
        // 32 ln(4e12) / lambda = 233_980.97
        assert_eq!(phase1_length(4, 1_000_000, lambda, 32.0), 233_982);
    }

    #[test]
    fn phase1_length_capped_at_horizon() {
        let lambda = auto_lambda(4, 10_000);
        assert_eq!(phase1_length(4, 10_000, lambda, 32.0), 10_000);
        assert_eq!(phase1_length(2, 5, 1e-300, 1.0), 5);
    }

    #[test]
    fn phase1_length_zero_constant() {
        assert_eq!(phase1_length(3, 1000, 0.1, 0.0), 1);
    }

    #[test]
    fn type_elimination_threshold() {
        let q = type_elimination(&[50, 30, 15, 5], 100, 0.2);
        assert_eq!(q.to_vec(), vec![0, 1, 2]);
    }

    #[test]
    fn type_elimination_boundary_inclusive() {
        // 3 * 0.4 / 4 = 0.3 exactly at count 30 of 100
        let q = type_elimination(&[30, 70], 100, 0.4);
        assert_eq!(q.to_vec(), vec![0, 1]);
    }

    #[test]
    fn type_elimination_tiny_lambda_keeps_everything() {
        let q = type_elimination(&[0, 10, 0], 10, 1e-15);
        assert_eq!(q.to_vec(), vec![0, 1, 2]);
    }

    #[test]
    fn elimination_rule_example() {
        let means = [0.2, 0.5, 0.4];
        let rho = 0.05;
        let upper: Vec<f64> = means.iter().map(|m| m + rho).collect();
        let lower: Vec<f64> = means.iter().map(|m| m - rho).collect();
        assert_eq!(elimination_cutoff(&upper, &lower), 1);
    }

    #[test]
    fn elimination_singleton_keeps_itself() {
        assert_eq!(elimination_cutoff(&[0.3], &[0.1]), 0);
        assert_eq!(elimination_cutoff(&[], &[]), 0);
    }

    #[test]
    fn first_phase2_width_blocks_elimination() {
        // d = 3, T = 1000, one phase-2 round: rho = sqrt(ln(3e6) / 2)
        let mut policy = policy_with_retained(vec![0.2, 0.5, 0.9], &[0, 1, 2]);
        assert_eq!(policy.active().unwrap(), &[0, 1, 2]);
        policy.update(4, &RoundOutcome::sold(0.0, 2)).unwrap();
        let rho = policy.rho().unwrap();
        assert!((rho - 2.730_762_059_080_98).abs() < 1e-12);
        assert_eq!(policy.active().unwrap(), &[0, 1, 2]);
        let step = policy.last_elimination().unwrap();
        assert_eq!(step.cutoff_type, Some(0));
    }

    fn policy_with_retained(theta: Vec<f64>, retained: &[u64]) -> TwoPhasePolicy {
        // lambda tiny so every type that appears in phase 1 is kept
        let d = theta.len();
        let rounds = retained.len() as u64;
        let mut policy = TwoPhasePolicy::new(
            theta,
            1000,
            &TwoPhaseConfig {
                lambda: Some(1e-9),
                phase1_constant: 0.0,
                eta: 0.1,
            },
        )
        .unwrap();
        policy.t_lambda = rounds;
        for (k, &j) in retained.iter().enumerate() {
            policy
                .update(k as u64 + 1, &RoundOutcome::sold(0.0, j as usize))
                .unwrap();
        }
        assert_eq!(policy.retained().unwrap().d(), d);
        policy
    }

    #[test]
    fn price_is_min_of_theta_and_seller_lb_over_active() {
        let mut policy = policy_with_retained(vec![0.3, 0.6, 0.9], &[0, 1, 2]);
        // force S = {1, 2}
        policy.cutoff = 1;
        let mut log = ReviewLog::new(3);
        let ln = (1000f64 / 0.1).ln();
        // n reviews of value m give LB = m - sqrt(ln / 2n)
        let n1 = 200;
        let n2 = 200;
        for _ in 0..n1 {
            log.append(1, 0.5 + (ln / (2.0 * n1 as f64)).sqrt())
                .unwrap();
        }
        for _ in 0..n2 {
            log.append(2, 0.7 + (ln / (2.0 * n2 as f64)).sqrt())
                .unwrap();
        }
        let lb1 = policy.seller_lb(&log, 1);
        let lb2 = policy.seller_lb(&log, 2);
        assert!((lb1 - 0.5).abs() < 1e-9 && (lb2 - 0.7).abs() < 1e-9);
        let p = policy.choose_price(4, &log);
        assert_eq!(p, lb1.min(0.6).min(lb2.min(0.9)));
        assert!((p - 0.5).abs() < 1e-9);
    }

    #[test]
    fn phase1_price_is_zero() {
        let mut policy =
            TwoPhasePolicy::new(vec![0.5, 0.9], 100, &TwoPhaseConfig::default()).unwrap();
        let log = ReviewLog::new(2);
        assert_eq!(policy.t_lambda(), 100);
        for t in 1..=100 {
            assert_eq!(policy.choose_price(t, &log), 0.0);
        }
    }

    #[test]
    fn empty_reviews_pin_phase2_price_to_zero() {
        let mut policy = policy_with_retained(vec![0.4, 0.8], &[0, 1]);
        let mut log = ReviewLog::new(2);
        for _ in 0..50 {
            log.append(1, 0.8).unwrap();
        }
        assert_eq!(policy.choose_price(3, &log), 0.0);
    }

    #[test]
    fn empty_retained_set_posts_one() {
        let mut policy = TwoPhasePolicy::new(
            vec![0.4, 0.8],
            100,
            &TwoPhaseConfig {
                lambda: Some(1.0),
                phase1_constant: 0.0,
                eta: 0.1,
            },
        )
        .unwrap();
        // the single phase-1 buyer never bought, so no type reaches 3/4
        policy.update(1, &RoundOutcome::unsold(0.0)).unwrap();
        assert!(policy.retained().unwrap().is_empty());
        assert_eq!(policy.choose_price(2, &ReviewLog::new(2)), 1.0);
    }

    #[test]
    fn estimates_follow_sales_to_higher_retained_types() {
        let mut policy = policy_with_retained(vec![0.2, 0.5, 0.8], &[0, 1, 2]);
        // phase 2: sale to type 1, no sale, sale to type 2
        policy.update(4, &RoundOutcome::sold(0.2, 1)).unwrap();
        policy.update(5, &RoundOutcome::unsold(0.2)).unwrap();
        policy.update(6, &RoundOutcome::sold(0.2, 2)).unwrap();
        assert_eq!(policy.rounds_in_phase2(), 3);
        assert_eq!(policy.phase2_hits(), &[2, 2, 1]);
        let e = policy.estimate(1).unwrap();
        assert!((e.mean - 0.5 * 2.0 / 3.0).abs() < 1e-15);
        let rho = policy.rho().unwrap();
        assert!((e.upper - e.lower - 2.0 * rho).abs() < 1e-12);
    }

    #[test]
    fn rejects_inconsistent_outcomes() {
        let mut policy = TwoPhasePolicy::new(vec![0.5], 10, &TwoPhaseConfig::default()).unwrap();
        let bad = RoundOutcome {
            price: 0.0,
            bought: true,
            revealed_type: None,
        };
        assert!(policy.update(1, &bad).is_err());
        assert!(policy.update(2, &RoundOutcome::sold(0.0, 0)).is_err());
        assert!(policy.update(1, &RoundOutcome::sold(0.0, 3)).is_err());
        assert!(policy.update(1, &RoundOutcome::sold(0.0, 0)).is_ok());
    }

    #[test]
    fn rejects_bad_configuration() {
        let cfg = |lambda, c, eta| TwoPhaseConfig {
            lambda,
            phase1_constant: c,
            eta,
        };
        assert!(TwoPhasePolicy::new(vec![0.5], 10, &cfg(Some(0.0), 2.0, 0.1)).is_err());
        assert!(TwoPhasePolicy::new(vec![0.5], 10, &cfg(None, -1.0, 0.1)).is_err());
        assert!(TwoPhasePolicy::new(vec![0.5], 10, &cfg(None, 2.0, 0.0)).is_err());
        assert!(TwoPhasePolicy::new(vec![0.9, 0.5], 10, &cfg(None, 2.0, 0.1)).is_err());
    }
}
