//! Configuration, deterministic parallel execution over scenario grids,
//! and table/figure-data emission.

mod config;
mod emit;
mod figures;
mod grid;
mod tables;

pub use config::{
    default_delays, load_config, parse_config, ScenarioGrid, DEFAULT_BASE_SEED, DEFAULT_REPLICATES,
};
pub use emit::{fmt_sig, summaries_to_csv, summaries_to_json, summary_header, SummaryDocument};
pub use figures::{emit_figure_data, FigureMetric};
pub use grid::{build_plan, derive_stream, family_id, run_cell, run_grid};
pub use tables::{reproduce_table, table_grid, TableId, TableOptions};
