//! Batch harness: run configuration, the shared simulation loop, metrics,
//! exports and side-by-side comparison.

mod compare;
mod config;
mod export;
mod metrics;
mod schedule;
mod sim;

use std::path::PathBuf;

pub use compare::{
    compare, render_table, rows_csv, sweep_seeds, Comparison, ComparisonRow, SeedSweep,
};
pub use config::{Mode, OutputConfig, RunConfig};
pub use export::{
    commands_csv, export, metrics_json, parse_commands, parse_trajectory, plot_svg, trajectory_csv,
    write_all_atomic, write_atomic, ExportPaths, MetricsReport,
};
pub use metrics::{compute_metrics, RunMetrics};
pub use schedule::{Schedule, ScheduledCommand};
pub use sim::{
    build_lookup, run_scenario, run_with_driver, DriverSource, Outcome, RunResult, Sample,
    Simulation, OFF_ROAD_MARGIN,
};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {field}: {reason}")]
    Config { field: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("nothing to export: the trajectory is empty")]
    EmptySeries,
    #[error("run already over ({0:?})")]
    Finished(Outcome),
    #[error(transparent)]
    Track(#[from] crate::track::TrackError),
    #[error(transparent)]
    Vehicle(#[from] crate::vehicle::VehicleError),
}
