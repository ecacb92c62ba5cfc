use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::fit::{fit_scaling_exponent, ScalingFit};
use crate::error::Result;
use crate::market::ProblemInstance;
use crate::rng::replicate_seed;
use crate::sellers::PolicySpec;
use crate::sim::{run_episode_summary, EpisodeSummary};

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRun {
    pub replicate: u64,
    pub seed: u64,
    pub total_revenue: f64,
    pub regret: f64,
}

/// Aggregate over the replicates of one `(policy, T)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub policy: String,
    pub horizon: u64,
    pub mean_regret: f64,
    /// Sample standard deviation over `sqrt(R)`; 0 for a single replicate.
    pub std_err: f64,
    pub runs: Vec<ReplicateRun>,
}

impl SweepCell {
    pub fn replicates(&self) -> usize {
        self.runs.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyFit {
    pub policy: String,
    /// `None` when fewer than two horizons had positive mean regret.
    pub fit: Option<ScalingFit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Ordered by policy (config order), then horizon.
    pub cells: Vec<SweepCell>,
    pub fits: Vec<PolicyFit>,
}

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub policy: String,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub replicates: u64,
    pub mean_regret: f64,
    pub std_err: f64,
}

/// One line of `exponents.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub policy: String,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub n_points: usize,
}

/// One line of `replicates.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    pub policy: String,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub replicate: u64,
    pub seed: u64,
    pub total_revenue: f64,
    pub regret: f64,
}

pub fn mean_and_std_err(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

struct Job<'a> {
    policy: &'a PolicySpec,
    instance: &'a ProblemInstance,
    replicate: u64,
    seed: u64,
}

/// Runs every `(policy, T, replicate)` episode of the config and aggregates.
///
/// Each episode's seed is a hash of the base seed, policy name, horizon and
/// replicate index, and results are reduced in that fixed order, so the output
/// is identical with or without parallelism.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let buyer = config.buyer_model()?;
    let two_phase = config.two_phase();
    let instances: Vec<ProblemInstance> = config
        .horizons
        .iter()
        .map(|&t| config.instance.resolve(t))
        .collect::<Result<_>>()?;

    let mut jobs = Vec::new();
    for policy in &config.policies {
        let name = policy.to_string();
        for instance in &instances {
            for replicate in 0..config.replicates {
                jobs.push(Job {
                    policy,
                    instance,
                    replicate,
                    seed: replicate_seed(config.base_seed, &name, instance.horizon(), replicate),
                });
            }
        }
    }
    info!("running {} episodes", jobs.len());

    let run = |job: &Job| -> Result<EpisodeSummary> {
        let policy = job.policy.build(job.instance, &two_phase)?;
        run_episode_summary(job.instance, policy, buyer, job.seed)
    };
    let summaries: Vec<EpisodeSummary> = if config.parallel {
        jobs.par_iter().map(run).collect::<Result<_>>()?
    } else {
        jobs.iter().map(run).collect::<Result<_>>()?
    };

    let mut cells: Vec<SweepCell> = Vec::new();
    for (job, summary) in jobs.iter().zip(&summaries) {
        let name = job.policy.to_string();
        let horizon = job.instance.horizon();
        let fresh = cells
            .last()
            .is_none_or(|c| c.policy != name || c.horizon != horizon);
        if fresh {
            cells.push(SweepCell {
                policy: name,
                horizon,
                mean_regret: 0.0,
                std_err: 0.0,
                runs: Vec::new(),
            });
        }
        cells
            .last_mut()
            .expect("cell pushed")
            .runs
            .push(ReplicateRun {
                replicate: job.replicate,
                seed: job.seed,
                total_revenue: summary.total_revenue,
                regret: summary.regret,
            });
    }
    for cell in &mut cells {
        let regrets: Vec<f64> = cell.runs.iter().map(|r| r.regret).collect();
        (cell.mean_regret, cell.std_err) = mean_and_std_err(&regrets);
    }

    let fits = config
        .policies
        .iter()
        .map(|policy| {
            let name = policy.to_string();
            let points: Vec<(f64, f64)> = cells
                .iter()
                .filter(|c| c.policy == name)
                .map(|c| (c.horizon as f64, c.mean_regret))
                .collect();
            let fit = match fit_scaling_exponent(&points) {
                Ok(fit) => Some(fit),
                Err(e) => {
                    warn!("no scaling fit for {name}: {e}");
                    None
                }
            };
            PolicyFit { policy: name, fit }
        })
        .collect();

    Ok(SweepResult { cells, fits })
}

impl SweepResult {
    pub fn cell(&self, policy: &str, horizon: u64) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.policy == policy && c.horizon == horizon)
    }

    pub fn fit(&self, policy: &str) -> Option<&ScalingFit> {
        self.fits
            .iter()
            .find(|f| f.policy == policy)
            .and_then(|f| f.fit.as_ref())
    }

    pub fn summary_rows(&self) -> Vec<SummaryRow> {
        self.cells
            .iter()
            .map(|c| SummaryRow {
                policy: c.policy.clone(),
                horizon: c.horizon,
                replicates: c.replicates() as u64,
                mean_regret: c.mean_regret,
                std_err: c.std_err,
            })
            .collect()
    }

    pub fn exponent_rows(&self) -> Vec<ExponentRow> {
        self.fits
            .iter()
            .map(|f| ExponentRow {
                policy: f.policy.clone(),
                slope: f.fit.map(|x| x.slope),
                intercept: f.fit.map(|x| x.intercept),
                n_points: f.fit.map_or(0, |x| x.n_points),
            })
            .collect()
    }

    pub fn replicate_rows(&self) -> Vec<ReplicateRow> {
        self.cells
            .iter()
            .flat_map(|c| {
                c.runs.iter().map(move |r| ReplicateRow {
                    policy: c.policy.clone(),
                    horizon: c.horizon,
                    replicate: r.replicate,
                    seed: r.seed,
                    total_revenue: r.total_revenue,
                    regret: r.regret,
                })
            })
            .collect()
    }

    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(out, &self.summary_rows())
    }

    pub fn write_exponents_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(out, &self.exponent_rows())
    }

    pub fn write_replicates_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(out, &self.replicate_rows())
    }

    /// Writes `summary.csv`, `exponents.csv` and `replicates.csv` into `dir`.
    pub fn write_all(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        self.write_summary_csv(fs::File::create(dir.join("summary.csv"))?)?;
        self.write_exponents_csv(fs::File::create(dir.join("exponents.csv"))?)?;
        self.write_replicates_csv(fs::File::create(dir.join("replicates.csv"))?)?;
        Ok(())
    }

    /// Mean regret per policy, keyed by horizon.
    pub fn regret_curves(&self) -> BTreeMap<String, Vec<(u64, f64)>> {
        let mut curves: BTreeMap<String, Vec<(u64, f64)>> = BTreeMap::new();
        for c in &self.cells {
            curves
                .entry(c.policy.clone())
                .or_default()
                .push((c.horizon, c.mean_regret));
        }
        curves
    }
}

fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary_csv<R: std::io::Read>(input: R) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_error_of_known_sample() {
        let (mean, se) = mean_and_std_err(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(mean, 2.5);
        // sample variance 5/3, se = sqrt(5/12)
        assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_std_err(&[7.0]), (7.0, 0.0));
    }
}
