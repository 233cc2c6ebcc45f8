//! Experiment harness: configs, parallel trials, CSV and JSON output, and
//! the command-line front end.

pub mod cli;
mod config;
mod experiment;
mod output;

pub use config::{Algorithm, ExperimentConfig, GraphName, GraphSource, Resolved, UidMode};
pub use experiment::{
    run_experiment, run_single, trial_seed, trial_sim_config, trial_topology, ExperimentResult,
    RoundStats, Summary, TrialResult, PHI_SAMPLES,
};
pub use output::{default_out_dir, outcome_json, summary_json, write_csv, OUT_DIR_ENV};

use crate::engine::EngineError;
use crate::graph::GraphError;
use crate::metrics::MetricsError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config field `{field}`: {message}")]
    Config {
        field: &'static str,
        message: String,
    },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn config(field: &'static str, message: String) -> Self {
        HarnessError::Config { field, message }
    }

    /// 1 for configuration problems, 2 for failures while running.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config { .. }
            | HarnessError::Engine(EngineError::Config(_))
            | HarnessError::Graph(GraphError::InvalidParams(_)) => 1,
            _ => 2,
        }
    }
}
