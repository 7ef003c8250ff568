//! Scenario configuration, Monte-Carlo sweeps, result files and the CLI.

pub mod cli;
mod config;
mod output;
mod run;

pub use config::{ScenarioConfig, ScenarioDistances};
pub use output::{emit_csv, emit_json, read_json, write_csv, CSV_HEADER};
pub use run::{
    aggregate, run_trial, run_trials, stream_seed, sweep, trial_seed, MethodRecord, PathRecord,
    Realization, Scenario, SweepAxis, SweepPoint, SweepResult, TrialRecord,
};
