//! Posted-price selling to buyers who learn their values from reviews.
//!
//! A seller posts one price per round to a stream of buyers of finitely many
//! types. Each buyer estimates its ex-ante value from the reviews of earlier
//! buyers of its own type and buys only when the price is below a pessimistic
//! estimate. The crate provides:
//!
//! - [`market`]: problem instances, the review log and the analytic revenue
//!   benchmark;
//! - [`buyers`]: lower-confidence-bound purchase rules;
//! - [`sellers`]: the two-phase successive-elimination policy and baselines;
//! - [`sim`]: the round protocol, traces and regret;
//! - [`instances`]: hard, easy and random instance families;
//! - [`experiment`]: seeded sweeps, scaling-exponent fits and validation.

pub mod buyers;
pub mod error;
pub mod experiment;
pub mod instances;
pub mod market;
pub mod rng;
pub mod sellers;
pub mod sim;

pub use error::{Error, Result};
