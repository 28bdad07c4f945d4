//! Experiment orchestration: configuration, sweeps and CSV output.

pub mod config;
pub mod experiments;
pub mod format;

pub use config::{load_config, parse_config, ConfigOverrides, ExperimentConfig};
pub use experiments::{
    fig2_rows, point, render_plot_script, run_fig2, run_point, run_table2, run_validate, table2_rows,
    validate, OdeComparison, PointReport, SweepRow, Table2Row, ValidationReport,
};
pub use format::format_sig;
