//! Experiment harness: flat configuration files, the shipped presets, output
//! files and SVG plots.

pub mod config;
pub mod error;
pub mod experiment;
pub mod plot;
pub mod presets;

pub use config::{parse_config, ExperimentConfig, KernelSpec, MetricModeTag, MuSpec, PotentialSpec};
pub use error::{CliError, ConfigError};
pub use experiment::{read_trace_csv, run_experiment, solve, write_trace_csv, ExperimentOutcome, Solution};
pub use plot::{emit_svg_plot, render_svg, PlotKind};
pub use presets::{list_presets, preset, preset_config, Preset, PRESETS};
