//! Round-by-round market simulation and regret accounting.
//!
//! Each round the seller posts a price, a buyer type is drawn, the buyer
//! compares the price with a threshold computed from its own type's reviews,
//! and a purchase appends a review drawn from that type's ex-post distribution.

use std::io::Write;

use crate::buyers::{decide_purchase, BuyerModel};
use crate::error::{Error, Result};
use crate::market::{ProblemInstance, ReviewLog};
use crate::rng::{stream_rng, SimRng, Stream};
use crate::sellers::{RoundOutcome, SellerPolicy};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    pub t: u64,
    pub price: f64,
    pub type_index: usize,
    pub threshold: f64,
    pub bought: bool,
    pub revenue: f64,
    /// Ex-post value left as a review, present iff the buyer bought.
    pub review: Option<f64>,
}

/// A single simulation run, advanced one round at a time.
pub struct Episode<'a, P> {
    instance: &'a ProblemInstance,
    policy: P,
    buyer: BuyerModel,
    reviews: ReviewLog,
    type_rng: SimRng,
    value_rng: SimRng,
    seed: u64,
    rounds_done: u64,
    total_revenue: f64,
}

impl<'a, P: SellerPolicy> Episode<'a, P> {
    pub fn new(instance: &'a ProblemInstance, policy: P, buyer: BuyerModel, seed: u64) -> Self {
        Self {
            instance,
            policy,
            buyer,
            reviews: ReviewLog::new(instance.d()),
            type_rng: stream_rng(seed, Stream::Types),
            value_rng: stream_rng(seed, Stream::ExPostValues),
            seed,
            rounds_done: 0,
            total_revenue: 0.0,
        }
    }

    pub fn policy(&self) -> &P {
        &self.policy
    }

    pub fn reviews(&self) -> &ReviewLog {
        &self.reviews
    }

    pub fn rounds_done(&self) -> u64 {
        self.rounds_done
    }

    pub fn is_finished(&self) -> bool {
        self.rounds_done >= self.instance.horizon()
    }

    pub fn total_revenue(&self) -> f64 {
        self.total_revenue
    }

    /// Plays the next round, or returns `None` once the horizon is reached.
    pub fn step(&mut self) -> Result<Option<RoundRecord>> {
        if self.is_finished() {
            return Ok(None);
        }
        let t = self.rounds_done + 1;
        let price = self.policy.choose_price(t, &self.reviews);
        if !(0.0..=1.0).contains(&price) {
            return Err(Error::InvalidParameter(format!(
                "policy posted price {price} on round {t}"
            )));
        }
        let type_index = self.instance.sample_type(&mut self.type_rng);
        let threshold = self.buyer.threshold(
            self.reviews.of_type(type_index),
            t,
            self.instance.theta()[type_index],
        );
        let bought = decide_purchase(threshold, price);
        let (revenue, review, outcome) = if bought {
            let value = self
                .instance
                .sample_ex_post(type_index, &mut self.value_rng)?;
            self.reviews.append(type_index, value)?;
            (price, Some(value), RoundOutcome::sold(price, type_index))
        } else {
            (0.0, None, RoundOutcome::unsold(price))
        };
        self.policy.update(t, &outcome)?;
        self.total_revenue += revenue;
        self.rounds_done = t;
        Ok(Some(RoundRecord {
            t,
            price,
            type_index,
            threshold,
            bought,
            revenue,
            review,
        }))
    }

    pub fn into_policy(self) -> P {
        self.policy
    }

    fn summary(&self, purchases: u64) -> EpisodeSummary {
        let benchmark_per_round = self.instance.benchmark_per_round();
        EpisodeSummary {
            seed: self.seed,
            horizon: self.instance.horizon(),
            purchases,
            total_revenue: self.total_revenue,
            benchmark_per_round,
            regret: regret_from(
                self.instance.horizon(),
                benchmark_per_round,
                self.total_revenue,
            ),
        }
    }
}

fn regret_from(horizon: u64, benchmark_per_round: f64, total_revenue: f64) -> f64 {
    horizon as f64 * benchmark_per_round - total_revenue
}

/// Scalar outcome of an episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeSummary {
    pub seed: u64,
    pub horizon: u64,
    pub purchases: u64,
    pub total_revenue: f64,
    /// `p* Pr[theta >= p*]` of the instance.
    pub benchmark_per_round: f64,
    /// `T * benchmark_per_round - total_revenue`; negative values are kept.
    pub regret: f64,
}

/// Full per-round record of an episode.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub records: Vec<RoundRecord>,
    pub summary: EpisodeSummary,
}

impl RunTrace {
    pub fn total_revenue(&self) -> f64 {
        self.summary.total_revenue
    }

    pub fn regret(&self) -> f64 {
        self.summary.regret
    }

    /// Writes `t,price,type,threshold,bought,revenue,review`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "t",
            "price",
            "type",
            "threshold",
            "bought",
            "revenue",
            "review",
        ])?;
        for r in &self.records {
            w.write_record([
                r.t.to_string(),
                r.price.to_string(),
                r.type_index.to_string(),
                r.threshold.to_string(),
                u8::from(r.bought).to_string(),
                r.revenue.to_string(),
                r.review.map(|v| v.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the one-line `seed,total_revenue,regret` summary.
    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["seed", "total_revenue", "regret"])?;
        w.write_record([
            self.summary.seed.to_string(),
            self.summary.total_revenue.to_string(),
            self.summary.regret.to_string(),
        ])?;
        w.flush()?;
        Ok(())
    }
}

/// Runs all `T` rounds and keeps every round record.
pub fn run_episode<P: SellerPolicy>(
    instance: &ProblemInstance,
    policy: P,
    buyer: BuyerModel,
    seed: u64,
) -> Result<RunTrace> {
    let mut episode = Episode::new(instance, policy, buyer, seed);
    let mut records = Vec::with_capacity(instance.horizon() as usize);
    while let Some(record) = episode.step()? {
        records.push(record);
    }
    let purchases = records.iter().filter(|r| r.bought).count() as u64;
    Ok(RunTrace {
        summary: episode.summary(purchases),
        records,
    })
}

/// Runs all `T` rounds keeping only the totals.
pub fn run_episode_summary<P: SellerPolicy>(
    instance: &ProblemInstance,
    policy: P,
    buyer: BuyerModel,
    seed: u64,
) -> Result<EpisodeSummary> {
    let mut episode = Episode::new(instance, policy, buyer, seed);
    let mut purchases = 0;
    while let Some(record) = episode.step()? {
        purchases += u64::from(record.bought);
    }
    Ok(episode.summary(purchases))
}

/// Regret of a completed trace against the analytic benchmark of `instance`.
pub fn regret(trace: &RunTrace, instance: &ProblemInstance) -> f64 {
    let realized: f64 = trace.records.iter().map(|r| r.revenue).sum();
    regret_from(instance.horizon(), instance.benchmark_per_round(), realized)
}
