//! Batch execution, scoring, result files and the command-line front end.

mod batch;
pub mod cli;
mod config_file;
mod metrics;

pub use batch::{
    read_batch_csv, run_batch, write_batch_csv, write_trace_csv, BatchRow, BatchSummary, BATCH_HEADER, TRACE_HEADER,
};
pub use config_file::{apply_config_text, load_config_file};
pub use metrics::{distance_d, fit_decay_rate, relative_error};
