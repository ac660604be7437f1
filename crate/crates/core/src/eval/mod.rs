//! Reference densities, Hellinger distance and the benchmark harness.

mod benchmark;
mod density;
mod hellinger;

pub use benchmark::{
    format_summary, mean_std, run_benchmark, run_cell, summarize, threads_from_env, write_records,
    BenchMethod, BenchmarkConfig, BenchmarkRecord, SummaryRow, THREADS_ENV,
};
pub use density::{Density, HistogramDensity, ReferenceDensity};
pub use hellinger::{hellinger, hellinger_with, GaussLegendre, HellingerOptions, DEFAULT_NODES};
