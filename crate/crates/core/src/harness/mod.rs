//! Seeded Monte Carlo experiments that compare sampled distances with the
//! closed-form bounds, and their reports.

mod bound_eval;
mod config;
mod experiments;
mod report;
mod selftest;

pub use bound_eval::{evaluate_bound, BOUND_NAMES};
pub use config::{ExperimentConfig, ExperimentKind, FSpec};
pub use experiments::{
    run_bound_experiment, run_estimator_sweep, run_experiment, run_mean_experiment, run_median_experiment, SLACK_SE,
};
pub use report::{
    emit, read_csv_rows, to_csv_string, write_report, Cell, ExperimentReport, Format, Metadata, ReportRow, CSV_HEADER,
};
pub use selftest::{selftest, SelfCheck, GOLDEN_MIX_000};

pub use crate::rng::derive_seed;
