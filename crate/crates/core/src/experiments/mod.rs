//! Experiment harness: built-in environments, seeded sweeps, CSV and SVG output.

pub mod env;
pub mod output;
pub mod plot;
pub mod sweep;

pub use env::{env_theta, list, load_env, ENV_NAMES};
pub use output::{emit_csv, emit_survival_csv, parse_sweep_csv, read_csv, CsvRow};
pub use plot::emit_plot;
pub use sweep::{run_sweep, Algorithm, EnvSource, ExperimentSpec, SweepAxis, SweepResult, SweepRow};
