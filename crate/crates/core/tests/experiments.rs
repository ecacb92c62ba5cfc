use approx::assert_relative_eq;

use review_pricing::buyers::BuyerKind;
use review_pricing::experiment::{read_summary_csv, run_sweep, ExperimentConfig, LambdaSetting};
use review_pricing::instances::InstanceSpec;
use review_pricing::market::ExPostDistribution;
use review_pricing::sellers::PolicySpec;

fn config(policies: Vec<PolicySpec>, buyer: BuyerKind, instance: InstanceSpec) -> ExperimentConfig {
    ExperimentConfig {
        instance,
        policies,
        buyer,
        eta: 0.1,
        horizons: vec![1000, 4000],
        replicates: 3,
        base_seed: 17,
        output_dir: "out".into(),
        phase1_constant: 2.0,
        lambda: LambdaSetting::Auto,
        parallel: true,
    }
}

fn explicit() -> InstanceSpec {
    let theta = vec![0.3, 0.6, 0.9];
    InstanceSpec::Explicit {
        value_dists: theta
            .iter()
            .map(|&t| ExPostDistribution::bernoulli(t).unwrap())
            .collect(),
        theta,
        q: vec![0.2, 0.3, 0.5],
    }
}

#[test]
fn zero_price_regret_is_full_benchmark() {
    let cfg = config(vec![PolicySpec::Fixed(0.0)], BuyerKind::ExactLb, explicit());
    let result = run_sweep(&cfg).unwrap();
    for cell in &result.cells {
        assert_relative_eq!(
            cell.mean_regret,
            cell.horizon as f64 * 0.48,
            max_relative = 1e-12
        );
        assert_eq!(cell.std_err, 0.0);
    }
}

#[test]
fn config_toml_round_trip() {
    let mut cfg = config(
        vec![
            PolicySpec::TwoPhase,
            PolicySpec::Fixed(0.25),
            PolicySpec::Oracle,
        ],
        BuyerKind::LbPlusSlack(0.05),
        explicit(),
    );
    cfg.lambda = LambdaSetting::Fixed(0.2);
    let text = cfg.to_toml().unwrap();
    assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
}

#[test]
fn summary_csv_round_trip_is_exact() {
    let cfg = config(
        vec![PolicySpec::TwoPhase, PolicySpec::Oracle],
        BuyerKind::ExactLb,
        InstanceSpec::Random { d: 4, seed: 2 },
    );
    let result = run_sweep(&cfg).unwrap();
    let mut buf = Vec::new();
    result.write_summary_csv(&mut buf).unwrap();
    let rows = read_summary_csv(buf.as_slice()).unwrap();
    assert_eq!(rows, result.summary_rows());
}

#[test]
fn serial_and_parallel_sweeps_agree() {
    let mut cfg = config(
        vec![PolicySpec::TwoPhase, PolicySpec::Fixed(0.5)],
        BuyerKind::FixedConfidence,
        InstanceSpec::Hard { d: 3, eta: 0.1 },
    );
    let parallel = run_sweep(&cfg).unwrap();
    cfg.parallel = false;
    assert_eq!(run_sweep(&cfg).unwrap(), parallel);
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = config(vec![PolicySpec::TwoPhase], BuyerKind::ExactLb, explicit());
    cfg.horizons = vec![4000, 1000];
    assert!(run_sweep(&cfg).is_err());
    cfg.horizons = vec![1000];
    cfg.replicates = 0;
    assert!(run_sweep(&cfg).is_err());
    let err = ExperimentConfig::from_toml("policies = []\nbuyer = \"exact_lb\"\nhorizons = [1]\nbogus = 1\n[instance]\nfamily = \"random\"\nd = 2\n");
    assert!(err.is_err());
}
