//! Configuration ingestion, experiment orchestration, and report
//! emission (RFC-4180 CSV plus a JSON reproducibility manifest).

mod config;
mod run;

pub use config::{emit_config, load_config, Command, ExperimentConfig, IncidentTermConfig};
pub use run::{run, CsvRow, EmittedValue, RunManifest, StageTiming};
