//! MDL-optimal irregular histograms.
//!
//! A histogram's endpoints live on a regular grid of accuracy `ε` around the
//! data. Three criteria score a histogram: Enum, its granularity-aware
//! variant G-Enum, and NML. A greedy bottom-up merge with local
//! post-optimisation finds near-optimal histograms in `O(n log n)`; a dynamic
//! program gives the exact optimum for small problems.

pub mod artifact;
pub mod criteria;
pub mod error;
pub mod eval;
pub mod grid;
pub mod model;
pub mod search;

pub use artifact::HistogramArtifact;
pub use criteria::{CostBreakdown, Criterion, Scorer};
pub use error::{Error, Result};
pub use eval::{hellinger, Density, HistogramDensity, ReferenceDensity};
pub use grid::{BinnedData, ColumnSelector, CutLattice, Dataset, GridSpec, GENUM_BINS};
pub use model::HistogramModel;
pub use search::{fit, FitMethod, FitResult, FitSpec, Resolution, Solver};
