//! Config-driven experiments: a TOML or JSON file describes a model and one
//! experiment; [`run`] validates it, runs it and writes a CSV table and a
//! JSON summary carrying the fully resolved config.
//!
//! ```toml
//! kind = "clt-rate"          # rates-table | clt-rate | coupling | newman
//!                            # | remainder | moddev | frolov
//! n_grid = [256, 1024, 4096]
//! replicates = 200000
//! master_seed = 7
//!
//! [model]
//! family = "geometric"       # iid | geometric | power | custom
//! rho = 0.5
//! k = 48
//! innovation = { kind = "centered-exponential", rate = 1.0 }
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Other keys: `alpha`, `q`, `theta`, `lambda`, `batches`, `t_scale`,
//! `q_grid`, `theta_grid`, `output.csv`, `output.summary`. Anything left out is
//! filled in by [`ExperimentConfig::resolve`] and recorded in the summary, so
//! feeding a summary back as `--config` repeats the run exactly.

mod config;
mod run;

pub use config::{
    Constraint, ExperimentConfig, ExperimentKind, ModelSpec, OutputSpec, Violation, DEFAULT_REPLICATES,
    DEFAULT_SEED,
};
pub use run::{execute, run, Artifacts, Check, RunOutput, RunSummary, Table, SUMMARY_SCHEMA};
