//! Sweep configuration, orchestration and CSV output.

pub mod config;
pub mod rows;
pub mod runs;

pub use config::SweepConfig;
pub use rows::{read_rows, write_csv, DofRow, EigenRow, ResultRow};
pub use runs::{
    run_distortion_sweep, run_dof_report, run_frontier, run_rate_sweep, run_validation, sibling_path,
};
