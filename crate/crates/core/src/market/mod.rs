//! Problem instances, ex-post value distributions, the review log and the
//! analytic revenue functions behind the regret benchmark.

mod distribution;
mod instance;
mod reviews;

pub use distribution::{DistSpec, ExPostDistribution};
pub use instance::{InstanceFile, OptimalPrice, ProblemInstance, TypeSet};
pub use reviews::{ReviewLog, TypeReviews};
