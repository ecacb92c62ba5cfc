//! Buyer purchase rules.
//!
//! A buyer sees only the reviews left by earlier buyers of its own type and
//! the round index. It buys whenever the posted price is at most its threshold.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::TypeReviews;

/// `max(0, mean - sqrt(log_term / (2n)))`, or 0 with no observations.
///
/// `sum` must be the left-to-right sum of the observations so that buyers and
/// sellers evaluating the same reviews get bit-identical bounds.
pub fn hoeffding_lower_bound(sum: f64, count: usize, log_term: f64) -> f64 {
    if count == 0 {
        return 0.0;
    }
    let n = count as f64;
    (sum / n - (log_term / (2.0 * n)).sqrt()).max(0.0)
}

/// Lower confidence bound of a buyer arriving at round `t` who sees `reviews`
/// of its own type, with confidence term `sqrt(ln(t / eta) / (2n))`.
pub fn compute_lb(reviews: &[f64], t: u64, eta: f64) -> f64 {
    let sum: f64 = reviews.iter().sum();
    hoeffding_lower_bound(sum, reviews.len(), (t as f64 / eta).ln())
}

fn lb_of(reviews: &TypeReviews, t: u64, eta: f64) -> f64 {
    hoeffding_lower_bound(reviews.sum(), reviews.len(), (t as f64 / eta).ln())
}

/// Purchase decision: buy iff `price <= threshold`.
pub fn decide_purchase(threshold: f64, price: f64) -> bool {
    price <= threshold
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuyerKind {
    /// Threshold equal to the lower confidence bound itself.
    ExactLb,
    /// Lower confidence bound plus a non-negative slack, capped at 1.
    LbPlusSlack(f64),
    /// Knows its ex-ante value.
    Omniscient,
    /// Confidence term `sqrt(ln(1/eta) / (2n))` with no dependence on the round.
    FixedConfidence,
}

impl FromStr for BuyerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(slack) = s.strip_prefix("lb_plus_slack:") {
            let slack: f64 = slack
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad slack in buyer model {s:?}")))?;
            if !(slack.is_finite() && slack >= 0.0) {
                return Err(Error::Config(format!("slack must be >= 0, got {slack}")));
            }
            return Ok(Self::LbPlusSlack(slack));
        }
        match s {
            "exact_lb" => Ok(Self::ExactLb),
            "omniscient" => Ok(Self::Omniscient),
            "fixed_confidence" | "section5" | "section5_threshold" => Ok(Self::FixedConfidence),
            other => Err(Error::Config(format!("unknown buyer model {other:?}"))),
        }
    }
}

impl fmt::Display for BuyerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ExactLb => f.write_str("exact_lb"),
            Self::LbPlusSlack(s) => write!(f, "lb_plus_slack:{s}"),
            Self::Omniscient => f.write_str("omniscient"),
            Self::FixedConfidence => f.write_str("fixed_confidence"),
        }
    }
}

impl Serialize for BuyerKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BuyerKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A purchase rule together with its confidence parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuyerModel {
    kind: BuyerKind,
    eta: f64,
}

impl BuyerModel {
    pub fn new(kind: BuyerKind, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eta must lie in (0, 1], got {eta}"
            )));
        }
        if let BuyerKind::LbPlusSlack(slack) = kind {
            if !(slack.is_finite() && slack >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "slack must be >= 0, got {slack}"
                )));
            }
        }
        Ok(Self { kind, eta })
    }

    pub fn kind(&self) -> BuyerKind {
        self.kind
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Threshold of a buyer at round `t` given the reviews of its own type.
    /// `true_theta` is consulted only by the omniscient model.
    pub fn threshold(&self, reviews: &TypeReviews, t: u64, true_theta: f64) -> f64 {
        match self.kind {
            BuyerKind::ExactLb => lb_of(reviews, t, self.eta),
            BuyerKind::LbPlusSlack(slack) => (lb_of(reviews, t, self.eta) + slack).min(1.0),
            BuyerKind::Omniscient => true_theta,
            BuyerKind::FixedConfidence => {
                hoeffding_lower_bound(reviews.sum(), reviews.len(), (1.0 / self.eta).ln())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::ReviewLog;
    use proptest::prelude::*;

    fn reviews(values: &[f64]) -> ReviewLog {
        let mut log = ReviewLog::new(1);
        for &v in values {
            log.append(0, v).unwrap();
        }
        log
    }

    #[test]
    fn empty_reviews_give_zero() {
        assert_eq!(compute_lb(&[], 1, 0.1), 0.0);
        assert_eq!(compute_lb(&[], 1000, 0.9), 0.0);
    }

    #[test]
    fn sixteen_reviews_at_round_160() {
        // 0.9 - sqrt(ln(160) / 32); ln 160 = 5.075173815233827
        let expected = 0.9 - (5.075_173_815_233_827_f64 / 32.0).sqrt();
        let lb = compute_lb(&[0.9; 16], 160, 1.0);
        assert!((lb - expected).abs() < 1e-12);
        assert!((lb - 0.501_755).abs() < 1e-6);
    }

    #[test]
    fn small_mean_clipped_at_zero() {
        assert_eq!(compute_lb(&[0.1, 0.1], 100, 0.1), 0.0);
    }

    #[test]
    fn fixed_confidence_threshold_drops_round_dependence() {
        let log = reviews(&[0.99; 8]);
        let model = BuyerModel::new(BuyerKind::FixedConfidence, 0.1).unwrap();
        // 0.99 - sqrt(ln(10) / 16)
        let expected = 0.99 - (std::f64::consts::LN_10 / 16.0).sqrt();
        for t in [9, 100, 100_000] {
            let tau = model.threshold(log.of_type(0), t, 0.99);
            assert!((tau - expected).abs() < 1e-12);
            assert!((tau - 0.6106).abs() < 1e-4);
        }
    }

    #[test]
    fn omniscient_reports_true_value() {
        let model = BuyerModel::new(BuyerKind::Omniscient, 0.1).unwrap();
        assert_eq!(model.threshold(reviews(&[]).of_type(0), 5, 0.6), 0.6);
    }

    #[test]
    fn exact_lb_delegates_to_compute_lb() {
        let values = [0.3, 0.9, 0.5, 1.0, 0.0, 0.7];
        let model = BuyerModel::new(BuyerKind::ExactLb, 0.05).unwrap();
        let log = reviews(&values);
        assert_eq!(
            model.threshold(log.of_type(0), 40, 0.5),
            compute_lb(&values, 40, 0.05)
        );
    }

    #[test]
    fn slack_is_added_and_capped() {
        let values = [1.0; 400];
        let log = reviews(&values);
        let model = BuyerModel::new(BuyerKind::LbPlusSlack(0.05), 0.1).unwrap();
        let lb = compute_lb(&values, 500, 0.1);
        assert!((model.threshold(log.of_type(0), 500, 1.0) - (lb + 0.05)).abs() < 1e-15);
        let big = BuyerModel::new(BuyerKind::LbPlusSlack(5.0), 0.1).unwrap();
        assert_eq!(big.threshold(log.of_type(0), 500, 1.0), 1.0);
    }

    #[test]
    fn purchase_boundary_is_inclusive() {
        assert!(decide_purchase(0.0, 0.0));
        assert!(decide_purchase(0.5, 0.5));
        assert!(!decide_purchase(0.49, 0.5));
    }

    #[test]
    fn model_strings_parse() {
        assert_eq!("exact_lb".parse::<BuyerKind>().unwrap(), BuyerKind::ExactLb);
        assert_eq!(
            "lb_plus_slack:0.25".parse::<BuyerKind>().unwrap(),
            BuyerKind::LbPlusSlack(0.25)
        );
        assert_eq!(
            "omniscient".parse::<BuyerKind>().unwrap(),
            BuyerKind::Omniscient
        );
        assert_eq!(
            "fixed_confidence".parse::<BuyerKind>().unwrap(),
            BuyerKind::FixedConfidence
        );
        assert_eq!(
            "section5_threshold".parse::<BuyerKind>().unwrap(),
            BuyerKind::FixedConfidence
        );
        assert!("lb_plus_slack:-1".parse::<BuyerKind>().is_err());
        assert!("bayes".parse::<BuyerKind>().is_err());
        assert!(BuyerModel::new(BuyerKind::ExactLb, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn lb_in_unit_interval_and_below_mean(
            values in prop::collection::vec(0.0f64..=1.0, 1..50),
            t in 1u64..10_000,
            eta in 0.001f64..0.999,
        ) {
            let lb = compute_lb(&values, t, eta);
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            prop_assert!((0.0..=1.0).contains(&lb));
            prop_assert!(lb <= mean);
        }

        #[test]
        fn adding_a_perfect_review_never_lowers_lb(
            values in prop::collection::vec(0.0f64..=1.0, 1..50),
            t in 1u64..10_000,
            eta in 0.001f64..0.999,
        ) {
            let before = compute_lb(&values, t, eta);
            let mut more = values.clone();
            more.push(1.0);
            prop_assert!(compute_lb(&more, t, eta) >= before - 1e-12);
        }

        #[test]
        fn seller_bound_never_exceeds_buyer_bound(
            values in prop::collection::vec(0.0f64..=1.0, 0..50),
            t in 1u64..5_000,
            extra in 0u64..5_000,
            eta in 0.001f64..0.999,
        ) {
            let horizon = t + extra;
            let sum: f64 = values.iter().sum();
            let seller = hoeffding_lower_bound(sum, values.len(), (horizon as f64 / eta).ln());
            prop_assert!(seller <= compute_lb(&values, t, eta));
        }

        #[test]
        fn every_pessimistic_kind_is_at_least_lb(
            values in prop::collection::vec(0.0f64..=1.0, 0..40),
            t in 1u64..1_000,
            eta in 0.001f64..0.999,
            slack in 0.0f64..0.5,
        ) {
            let log = reviews(&values);
            let lb = compute_lb(&values, t, eta);
            for kind in [BuyerKind::ExactLb, BuyerKind::LbPlusSlack(slack), BuyerKind::FixedConfidence] {
                let model = BuyerModel::new(kind, eta).unwrap();
                prop_assert!(model.threshold(log.of_type(0), t, 0.5) >= lb);
            }
        }
    }
}
