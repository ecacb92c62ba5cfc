use super::{RoundOutcome, SellerPolicy};
use crate::error::{Error, Result};
use crate::market::ReviewLog;

/// Posts the same price every round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPrice {
    price: f64,
}

impl FixedPrice {
    pub fn new(price: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&price) {
            return Err(Error::InvalidParameter(format!(
                "fixed price {price} outside [0, 1]"
            )));
        }
        Ok(Self { price })
    }

    pub fn price(&self) -> f64 {
        self.price
    }
}

impl SellerPolicy for FixedPrice {
    fn choose_price(&mut self, _t: u64, _reviews: &ReviewLog) -> f64 {
        self.price
    }

    fn update(&mut self, _t: u64, outcome: &RoundOutcome) -> Result<()> {
        outcome.check()
    }
}
