//! Configuration-driven experiments: sweeps over the horizon or the
//! adversarial percentage, CSV tables and SVG plots.

mod config;
mod plot;
mod presets;
mod runner;

pub use config::{
    AdversaryConfig, ExperimentConfig, ExperimentError, MatrixConfig, ModeConfig, SweepConfig, TraceConfig,
};
pub use plot::emit_plot;
pub use presets::{preset, preset_names};
pub use runner::{read_csv, rows_to_csv, run_experiment, write_outputs, ResultRow, CSV_HEADER};
