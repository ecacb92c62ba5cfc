//! Seller pricing policies.
//!
//! The seller knows the ex-ante values of every type but not the type
//! distribution. It observes the public review log and, after each round,
//! whether the item sold; a buyer's type is revealed only through its review.

mod baseline;
mod two_phase;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use baseline::FixedPrice;
pub use two_phase::{
    elimination_cutoff, phase1_length, type_elimination, EliminationStep, RevenueEstimate,
    TwoPhaseConfig, TwoPhasePolicy, DEFAULT_PHASE1_CONSTANT,
};

use crate::error::{Error, Result};
use crate::market::{ProblemInstance, ReviewLog, TypeSet};

/// What the seller learns at the end of a round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundOutcome {
    pub price: f64,
    pub bought: bool,
    /// Present exactly when the buyer purchased and left a review.
    pub revealed_type: Option<usize>,
}

impl RoundOutcome {
    pub fn sold(price: f64, type_index: usize) -> Self {
        Self {
            price,
            bought: true,
            revealed_type: Some(type_index),
        }
    }

    pub fn unsold(price: f64) -> Self {
        Self {
            price,
            bought: false,
            revealed_type: None,
        }
    }

    pub(crate) fn check(&self) -> Result<()> {
        match (self.bought, self.revealed_type) {
            (true, None) => Err(Error::InconsistentOutcome(
                "purchase reported without the buyer's type".into(),
            )),
            (false, Some(_)) => Err(Error::InconsistentOutcome(
                "type revealed although the buyer did not purchase".into(),
            )),
            _ => Ok(()),
        }
    }
}

pub trait SellerPolicy {
    /// Price posted on round `t` (1-based) given the reviews left so far.
    fn choose_price(&mut self, t: u64, reviews: &ReviewLog) -> f64;

    /// Feeds back the outcome of round `t`.
    fn update(&mut self, t: u64, outcome: &RoundOutcome) -> Result<()>;
}

/// Policy selector as written in experiment configs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicySpec {
    TwoPhase,
    Fixed(f64),
    /// Posts the benchmark price `p*([d])` every round.
    Oracle,
}

impl FromStr for PolicySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(p) = s.strip_prefix("fixed:") {
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad price in policy {s:?}")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("fixed price {p} outside [0, 1]")));
            }
            return Ok(Self::Fixed(p));
        }
        match s {
            "two_phase" => Ok(Self::TwoPhase),
            "oracle" => Ok(Self::Oracle),
            other => Err(Error::Config(format!("unknown policy {other:?}"))),
        }
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TwoPhase => f.write_str("two_phase"),
            Self::Fixed(p) => write!(f, "fixed:{p}"),
            Self::Oracle => f.write_str("oracle"),
        }
    }
}

impl Serialize for PolicySpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PolicySpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl PolicySpec {
    pub fn build(
        &self,
        instance: &ProblemInstance,
        two_phase: &TwoPhaseConfig,
    ) -> Result<AnyPolicy> {
        Ok(match *self {
            Self::TwoPhase => {
                AnyPolicy::TwoPhase(TwoPhasePolicy::for_instance(instance, two_phase)?)
            }
            Self::Fixed(p) => AnyPolicy::Fixed(FixedPrice::new(p)?),
            Self::Oracle => {
                let opt = instance.optimal_price(&TypeSet::all(instance.d()))?;
                AnyPolicy::Fixed(FixedPrice::new(opt.price)?)
            }
        })
    }
}

/// Statically dispatched union of the built-in policies.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone)]
pub enum AnyPolicy {
    TwoPhase(TwoPhasePolicy),
    Fixed(FixedPrice),
}

impl AnyPolicy {
    pub fn as_two_phase(&self) -> Option<&TwoPhasePolicy> {
        match self {
            Self::TwoPhase(p) => Some(p),
            Self::Fixed(_) => None,
        }
    }
}

impl SellerPolicy for AnyPolicy {
    fn choose_price(&mut self, t: u64, reviews: &ReviewLog) -> f64 {
        match self {
            Self::TwoPhase(p) => p.choose_price(t, reviews),
            Self::Fixed(p) => p.choose_price(t, reviews),
        }
    }

    fn update(&mut self, t: u64, outcome: &RoundOutcome) -> Result<()> {
        match self {
            Self::TwoPhase(p) => p.update(t, outcome),
            Self::Fixed(p) => p.update(t, outcome),
        }
    }
}
