//! Configuration files, parameter sweeps and persistence of runs.

pub mod config;
pub mod store;
pub mod sweep;

pub use config::KeyValues;
pub use store::{load_run, output_dir, persist_run, SimulationRecord, StoredRecord, OUT_ENV};
pub use sweep::{
    agreement, phase_csv, run_sweep, run_sweep_to_file, Agreement, Axis, AxisVar, PhasePoint, SweepSpec, CSV_HEADER,
};
