use rand::Rng;
use serde::{Deserialize, Serialize};

use super::distribution::ExPostDistribution;
use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-12;
const MEAN_TOLERANCE: f64 = 1e-12;

/// A finite-type selling problem over a fixed horizon.
///
/// Types are indexed `0..d` in non-decreasing order of ex-ante value. The
/// instance is immutable once built and can be shared across concurrent runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile", into = "InstanceFile")]
pub struct ProblemInstance {
    theta: Vec<f64>,
    q: Vec<f64>,
    value_dists: Vec<ExPostDistribution>,
    horizon: u64,
    cumulative_q: Vec<f64>,
}

/// On-disk layout of an instance file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub d: usize,
    #[serde(rename = "horizon_T")]
    pub horizon_t: u64,
    pub theta: Vec<f64>,
    pub q: Vec<f64>,
    pub value_dists: Vec<ExPostDistribution>,
}

impl ProblemInstance {
    pub fn new(
        theta: Vec<f64>,
        q: Vec<f64>,
        value_dists: Vec<ExPostDistribution>,
        horizon: u64,
    ) -> Result<Self> {
        let d = theta.len();
        let invalid = |msg: String| Err(Error::InvalidInstance(msg));
        if d == 0 {
            return invalid("at least one type is required".into());
        }
        if q.len() != d || value_dists.len() != d {
            return invalid(format!(
                "length mismatch: {d} values, {} probabilities, {} distributions",
                q.len(),
                value_dists.len()
            ));
        }
        if horizon == 0 {
            return invalid("horizon must be positive".into());
        }
        for (i, &th) in theta.iter().enumerate() {
            if !th.is_finite() || !(0.0..=1.0).contains(&th) {
                return invalid(format!("theta[{i}] = {th} is outside [0, 1]"));
            }
        }
        if theta.windows(2).any(|w| w[0] > w[1]) {
            return invalid("theta must be sorted non-decreasing".into());
        }
        for (i, &qi) in q.iter().enumerate() {
            if !qi.is_finite() || qi <= 0.0 || qi > 1.0 {
                return invalid(format!("q[{i}] = {qi} is outside (0, 1]"));
            }
        }
        let total: f64 = q.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return invalid(format!("type probabilities sum to {total}, not 1"));
        }
        for (i, (dist, &th)) in value_dists.iter().zip(&theta).enumerate() {
            // re-run constructor validation for values built by hand
            let dist = ExPostDistribution::try_from(crate::market::DistSpec::from(*dist))?;
            if (dist.mean() - th).abs() > MEAN_TOLERANCE {
                return invalid(format!(
                    "distribution {i} has mean {} but theta[{i}] = {th}",
                    dist.mean()
                ));
            }
        }
        let cumulative_q = q
            .iter()
            .scan(0.0, |acc, &qi| {
                *acc += qi;
                Some(*acc)
            })
            .collect();
        Ok(Self {
            theta,
            q,
            value_dists,
            horizon,
            cumulative_q,
        })
    }

    /// Same types and distributions over a different horizon.
    pub fn with_horizon(&self, horizon: u64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidInstance("horizon must be positive".into()));
        }
        Ok(Self {
            horizon,
            ..self.clone()
        })
    }

    pub fn d(&self) -> usize {
        self.theta.len()
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn value_dists(&self) -> &[ExPostDistribution] {
        &self.value_dists
    }

    pub fn q_min(&self) -> f64 {
        self.q.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn check_type(&self, index: usize) -> Result<()> {
        if index < self.d() {
            Ok(())
        } else {
            Err(Error::TypeOutOfRange { index, d: self.d() })
        }
    }

    /// Draws a buyer type with probability `q[i]`.
    pub fn sample_type<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        match self.cumulative_q.iter().position(|&c| u < c) {
            Some(i) => i,
            // rounding left the last cumulative value just below 1
            None => self.d() - 1,
        }
    }

    /// Draws the ex-post value experienced by a buyer of type `index`.
    pub fn sample_ex_post<R: Rng + ?Sized>(&self, index: usize, rng: &mut R) -> Result<f64> {
        self.check_type(index)?;
        Ok(self.value_dists[index].sample(rng))
    }

    /// Probability that a random buyer has type in `set` and ex-ante value at least `price`.
    pub fn purchase_probability(&self, price: f64, set: &TypeSet) -> f64 {
        set.iter()
            .filter(|&i| self.theta[i] >= price)
            .map(|i| self.q[i])
            .sum()
    }

    /// Expected per-round revenue of `price` counting only buyers in `set`.
    pub fn rev(&self, price: f64, set: &TypeSet) -> f64 {
        price * self.purchase_probability(price, set)
    }

    /// Revenue-maximizing price for buyers in `set`.
    ///
    /// The maximum over `[0, 1]` is attained at some `theta[i]` with `i` in the
    /// set, so only those candidates are evaluated. Ties go to the largest
    /// price, then the largest index.
    pub fn optimal_price(&self, set: &TypeSet) -> Result<OptimalPrice> {
        let mut best: Option<OptimalPrice> = None;
        for i in set.iter() {
            let price = self.theta[i];
            let revenue = self.rev(price, set);
            let better = match &best {
                None => true,
                Some(b) => {
                    revenue > b.revenue
                        || (revenue == b.revenue
                            && (price > b.price || (price == b.price && i > b.index)))
                }
            };
            if better {
                best = Some(OptimalPrice {
                    price,
                    index: i,
                    revenue,
                });
            }
        }
        best.ok_or(Error::EmptyTypeSet)
    }

    /// `p*([d]) * Pr[theta >= p*]`, the per-round revenue of the regret benchmark.
    pub fn benchmark_per_round(&self) -> f64 {
        self.optimal_price(&TypeSet::all(self.d()))
            .map(|o| o.revenue)
            .unwrap_or(0.0)
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            d: self.d(),
            horizon_t: self.horizon,
            theta: self.theta.clone(),
            q: self.q.clone(),
            value_dists: self.value_dists.clone(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(&self.to_file())?)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }
}

impl TryFrom<InstanceFile> for ProblemInstance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        if file.d != file.theta.len() {
            return Err(Error::InvalidInstance(format!(
                "d = {} but theta has {} entries",
                file.d,
                file.theta.len()
            )));
        }
        Self::new(file.theta, file.q, file.value_dists, file.horizon_t)
    }
}

impl From<ProblemInstance> for InstanceFile {
    fn from(instance: ProblemInstance) -> Self {
        instance.to_file()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalPrice {
    pub price: f64,
    pub index: usize,
    /// `rev(price, set)` at the optimum.
    pub revenue: f64,
}

/// Subset of the type indices `0..d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeSet {
    mask: Vec<bool>,
}

impl TypeSet {
    pub fn empty(d: usize) -> Self {
        Self {
            mask: vec![false; d],
        }
    }

    pub fn all(d: usize) -> Self {
        Self {
            mask: vec![true; d],
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(d: usize, indices: I) -> Result<Self> {
        let mut set = Self::empty(d);
        for i in indices {
            if i >= d {
                return Err(Error::TypeOutOfRange { index: i, d });
            }
            set.mask[i] = true;
        }
        Ok(set)
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        Self { mask }
    }

    pub fn d(&self) -> usize {
        self.mask.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask.get(i).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    pub fn is_subset(&self, other: &TypeSet) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    /// Members in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}
