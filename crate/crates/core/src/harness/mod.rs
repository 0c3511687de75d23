//! Experiment harness: config files, trace persistence, sweeps, plot data,
//! and the built-in invariant battery.

pub mod config;
pub mod kv;
pub mod plot;
pub mod runner;
pub mod sweep;
pub mod trace;
pub mod verify;

pub use config::{ExperimentConfig, OptimizerSpec, ProblemInstance, ProblemSpec};
pub use runner::{run_experiment, run_experiment_in, RunOutput, SummaryRow};
pub use sweep::{sweep, SweepOutput, SweepPoint};
pub use trace::TraceRecord;
