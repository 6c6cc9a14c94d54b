//! Experiment campaigns over the default geometry, the test source, error
//! metrics and the numeric bound checks.

mod bounds;
mod config;
mod experiments;
pub mod metrics;
mod source;
mod store;

use thiserror::Error;

pub use bounds::{verify_bounds, BoundsReport, CheckSummary, Violation, EQUALITY_SLACK};
pub use config::ExperimentConfig;
pub use experiments::{
    arc_errors, reconstruct_at, run_phase_retrieval_experiment, run_reconstruction_experiment,
    write_geometry_csv, write_geometry_files, write_reconstruction_outputs, write_retrieval_tables,
    write_source_exact, write_table5, DataPath, ErrorReport, ReconstructionOutcome,
    ReconstructionRow, RetrievalRow,
};
pub use metrics::{rel_inf_error, rel_l2_error, MetricError};
pub use source::{test_source, test_source_field};
pub use store::ForwardStore;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Forward(#[from] crate::forward::ForwardError),
    #[error(transparent)]
    Retrieval(#[from] crate::phase_retrieval::RetrievalError),
    #[error(transparent)]
    Fourier(#[from] crate::fourier::FourierError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Specfun(#[from] crate::specfun::SpecfunError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
