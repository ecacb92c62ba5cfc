use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;

use review_pricing::experiment::{run_sweep, run_validation_suite, ExperimentConfig, SuiteParams};
use review_pricing::instances::build_hard_instance;
use review_pricing::rng::replicate_seed;
use review_pricing::sellers::PolicySpec;
use review_pricing::sim::run_episode;
use review_pricing::{Error, Result};

#[derive(Parser)]
#[command(
    name = "review-pricing",
    version,
    about = "Posted-price selling to review-learning buyers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single episode and write its per-round trace as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Policy to run; defaults to the first policy in the config.
        #[arg(long)]
        policy: Option<String>,
        /// Horizon; defaults to the first horizon in the config.
        #[arg(long)]
        horizon: Option<u64>,
        /// Replicate index used to derive the seed, as in `sweep`.
        #[arg(long, default_value_t = 0)]
        replicate: u64,
        /// Trace CSV path; `-` writes to stdout.
        #[arg(long, default_value = "-")]
        output: String,
        /// Optional `seed,total_revenue,regret` CSV path.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Run every policy/horizon/replicate of a config and write summary CSVs.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Run episodes on a single thread.
        #[arg(long)]
        serial: bool,
    },
    /// Run the coverage and revenue-oracle checks; exits non-zero on failure.
    Validate {
        #[arg(long, default_value_t = SuiteParams::default().episodes)]
        episodes: u64,
        #[arg(long, default_value_t = SuiteParams::default().horizon)]
        horizon: u64,
        #[arg(long, default_value_t = SuiteParams::default().eta)]
        eta: f64,
        #[arg(long, default_value_t = SuiteParams::default().rev_trials)]
        trials: u64,
        #[arg(long, default_value_t = SuiteParams::default().seed)]
        seed: u64,
    },
    /// Print the lower-bound hard instance as an instance file.
    HardInstance {
        #[arg(short = 'T', long = "horizon")]
        horizon: u64,
        #[arg(short, long)]
        d: usize,
        #[arg(long, default_value_t = 0.1)]
        eta: f64,
    },
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            config,
            policy,
            horizon,
            replicate,
            output,
            summary,
        } => {
            let config = ExperimentConfig::load(&config)?;
            let policy: PolicySpec = match policy {
                Some(p) => p.parse()?,
                None => config.policies[0],
            };
            let horizon = horizon.unwrap_or(config.horizons[0]);
            let instance = config.instance.resolve(horizon)?;
            let seed = replicate_seed(config.base_seed, &policy.to_string(), horizon, replicate);
            let built = policy.build(&instance, &config.two_phase())?;
            let trace = run_episode(&instance, built, config.buyer_model()?, seed)?;
            if output == "-" {
                trace.write_csv(io::stdout().lock())?;
            } else {
                trace.write_csv(File::create(&output)?)?;
            }
            if let Some(path) = summary {
                trace.write_summary_csv(File::create(path)?)?;
            }
            info!(
                "{policy} T={horizon} seed={seed}: revenue {} regret {}",
                trace.total_revenue(),
                trace.regret()
            );
            Ok(true)
        }
        Command::Sweep {
            config,
            output_dir,
            serial,
        } => {
            let mut config = ExperimentConfig::load(&config)?;
            if serial {
                config.parallel = false;
            }
            let dir = output_dir.unwrap_or_else(|| config.output_dir.clone());
            let result = run_sweep(&config)?;
            result.write_all(&dir)?;
            let mut out = io::stdout().lock();
            writeln!(out, "policy,slope,intercept,n_points")?;
            for row in result.exponent_rows() {
                let show = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{}",
                    row.policy,
                    show(row.slope),
                    show(row.intercept),
                    row.n_points
                )?;
            }
            Ok(true)
        }
        Command::Validate {
            episodes,
            horizon,
            eta,
            trials,
            seed,
        } => {
            let params = SuiteParams {
                episodes,
                horizon,
                eta,
                rev_trials: trials,
                seed,
                ..SuiteParams::default()
            };
            let report = run_validation_suite(&params)?;
            let mut out = io::stdout().lock();
            for c in &report.coverage {
                writeln!(
                    out,
                    "[{}] coverage {}: {}/{} episodes violated (rate {:.4} <= bound {:.4})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.policy,
                    c.violating_episodes,
                    c.episodes,
                    c.rate,
                    c.bound
                )?;
            }
            for (k, r) in report.rev_oracle.iter().enumerate() {
                let failed = r.checks.iter().filter(|c| !c.passed).count();
                writeln!(
                    out,
                    "[{}] rev oracle instance {k}: {failed} of {} checks outside 4-sigma band (max deviation {:.2e})",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.checks.len(),
                    r.max_deviation
                )?;
            }
            Ok(report.passed())
        }
        Command::HardInstance { horizon, d, eta } => {
            let instance = build_hard_instance(horizon, d, eta)?;
            print!("{}", instance.to_toml()?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
