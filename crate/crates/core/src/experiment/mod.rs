//! Experiment driver: configs, replicate sweeps, scaling fits and the
//! statistical validation suite.

mod config;
mod fit;
mod sweep;
mod validate;

pub use config::{ExperimentConfig, LambdaSetting, DESK_PHASE1_CONSTANT};
pub use fit::{fit_scaling_exponent, ScalingFit};
pub use sweep::{
    mean_and_std_err, read_summary_csv, run_sweep, ExponentRow, PolicyFit, ReplicateRow,
    ReplicateRun, SummaryRow, SweepCell, SweepResult,
};
pub use validate::{
    check_rev, coverage_instance, run_validation_suite, validate_pessimism_coverage,
    validate_rev_oracle, CoverageReport, CoverageSetup, RevCheck, RevOracleReport, SuiteParams,
    SuiteReport,
};
