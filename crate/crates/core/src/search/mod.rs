//! Searching for the minimum-cost histogram.

mod dp;
mod genum;
mod greedy;
mod post;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

pub use dp::{default_k_max, dp_optimal_on, DpOptions, DpOutcome, DEFAULT_DP_BUDGET};
pub use genum::{genum_fit, genum_scan, granularities, FineGrid, GenumOptions, GranularityFit};
pub use greedy::{greedy_merge, GreedyOutcome, MergeStep, SearchState};
pub use post::{post_optimize, PostOutcome, MAX_SWEEPS};

use crate::criteria::{CostBreakdown, Criterion, Scorer};
use crate::error::{Error, Result};
use crate::grid::{BinnedData, CutLattice, Dataset, GridSpec};
use crate::model::HistogramModel;

/// Histogram construction method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitMethod {
    Enum,
    Nml,
    GEnum,
}

impl FitMethod {
    /// Criterion optimised on a fixed grid, `None` for G-Enum.
    pub fn criterion(self) -> Option<Criterion> {
        match self {
            FitMethod::Enum => Some(Criterion::Enum),
            FitMethod::Nml => Some(Criterion::Nml),
            FitMethod::GEnum => None,
        }
    }
}

impl fmt::Display for FitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitMethod::Enum => "enum",
            FitMethod::Nml => "nml",
            FitMethod::GEnum => "genum",
        })
    }
}

impl FromStr for FitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enum" => Ok(FitMethod::Enum),
            "nml" => Ok(FitMethod::Nml),
            "genum" | "g-enum" => Ok(FitMethod::GEnum),
            other => Err(Error::invalid(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    Greedy,
    Dp,
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::Greedy => "greedy",
            Solver::Dp => "dp",
        })
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Solver::Greedy),
            "dp" => Ok(Solver::Dp),
            other => Err(Error::invalid(format!("unknown solver {other:?}"))),
        }
    }
}

/// A fitted histogram together with the grid its endpoints refer to.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub model: HistogramModel,
    pub grid: GridSpec,
    pub cost: CostBreakdown,
    pub method: FitMethod,
    /// Selected granularity (G-Enum only).
    pub granularity: Option<u64>,
    /// Merges for greedy, interval-count levels for DP, granularities for G-Enum.
    pub iterations: usize,
    pub elapsed: Duration,
}

impl FitResult {
    pub fn density_at(&self, x: f64) -> f64 {
        self.model.density_at(&self.grid, x)
    }
}

fn method_of(criterion: Criterion) -> FitMethod {
    match criterion {
        Criterion::Enum => FitMethod::Enum,
        Criterion::Nml => FitMethod::Nml,
    }
}

/// Greedy merge to a single interval, best-of-path selection, then local
/// post-optimisation, all on `lattice`.
pub fn greedy_fit_on(
    lattice: &CutLattice,
    grid: &GridSpec,
    criterion: Criterion,
    post: bool,
) -> Result<FitResult> {
    let start = Instant::now();
    let scorer = Scorer::new(criterion, lattice.n(), lattice.bins(), lattice.intervals());
    let greedy = greedy_merge(lattice, &scorer);
    let positions = if post {
        post_optimize(lattice, &scorer, greedy.positions).positions
    } else {
        greedy.positions
    };
    let model = HistogramModel::from_lattice_positions(lattice, &positions);
    Ok(FitResult {
        cost: scorer.breakdown(&model)?,
        model,
        grid: *grid,
        method: method_of(criterion),
        granularity: None,
        iterations: greedy.merges,
        elapsed: start.elapsed(),
    })
}

/// [`greedy_fit_on`] over the candidate endpoints flanking the data.
pub fn greedy_fit(bd: &BinnedData, grid: &GridSpec, criterion: Criterion) -> Result<FitResult> {
    greedy_fit_on(&CutLattice::candidates(bd), grid, criterion, true)
}

/// Exact optimum on `lattice`.
pub fn dp_optimal(
    lattice: &CutLattice,
    grid: &GridSpec,
    criterion: Criterion,
    opts: &DpOptions,
) -> Result<FitResult> {
    let start = Instant::now();
    let k_cap = opts
        .k_max
        .unwrap_or_else(|| default_k_max(lattice.n(), lattice))
        .max(lattice.intervals());
    let scorer = Scorer::new(criterion, lattice.n(), lattice.bins(), k_cap);
    let out = dp_optimal_on(lattice, &scorer, opts)?;
    let model = HistogramModel::from_lattice_positions(lattice, &out.positions);
    Ok(FitResult {
        cost: scorer.breakdown(&model)?,
        model,
        grid: *grid,
        method: method_of(criterion),
        granularity: None,
        iterations: out.k_max,
        elapsed: start.elapsed(),
    })
}

/// Grid resolution for the fixed-grid methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution {
    Epsilon(f64),
    Bins(u64),
}

/// Everything needed to fit one dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitSpec {
    pub method: FitMethod,
    /// Ignored by G-Enum.
    pub resolution: Resolution,
    pub solver: Solver,
    pub dp_budget: u128,
}

impl FitSpec {
    pub fn genum() -> Self {
        Self {
            method: FitMethod::GEnum,
            resolution: Resolution::Bins(crate::grid::GENUM_BINS),
            solver: Solver::Greedy,
            dp_budget: DEFAULT_DP_BUDGET,
        }
    }

    pub fn fixed(criterion: Criterion, resolution: Resolution, solver: Solver) -> Self {
        Self {
            method: method_of(criterion),
            resolution,
            solver,
            dp_budget: DEFAULT_DP_BUDGET,
        }
    }
}

/// Fits `d` according to `spec`. Both solvers search the candidate endpoints.
pub fn fit(d: &Dataset, spec: &FitSpec) -> Result<FitResult> {
    let criterion = match spec.method.criterion() {
        None => {
            if spec.solver == Solver::Dp {
                return Err(Error::invalid("G-Enum is only available with the greedy solver"));
            }
            return genum_fit(d, &GenumOptions::default());
        }
        Some(c) => c,
    };
    let start = Instant::now();
    let grid = match spec.resolution {
        Resolution::Epsilon(eps) => GridSpec::with_accuracy(d, eps)?,
        Resolution::Bins(e) => GridSpec::with_bins(d, e)?,
    };
    let bd = BinnedData::new(d, &grid);
    let lattice = CutLattice::candidates(&bd);
    let mut result = match spec.solver {
        Solver::Greedy => greedy_fit_on(&lattice, &grid, criterion, true)?,
        Solver::Dp => {
            let opts = DpOptions {
                budget: spec.dp_budget,
                ..Default::default()
            };
            dp_optimal(&lattice, &grid, criterion, &opts)?
        }
    };
    result.elapsed = start.elapsed();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_value_fits_are_trivial() {
        let d = Dataset::new(vec![5.0]).unwrap();
        for spec in [
            FitSpec::genum(),
            FitSpec::fixed(Criterion::Enum, Resolution::Epsilon(0.01), Solver::Greedy),
            FitSpec::fixed(Criterion::Nml, Resolution::Epsilon(0.01), Solver::Dp),
        ] {
            let r = fit(&d, &spec).unwrap();
            assert_eq!(r.model.k(), 1);
        }
    }

    #[test]
    fn genum_rejects_dp() {
        let d = Dataset::new(vec![1.0, 2.0]).unwrap();
        let mut spec = FitSpec::genum();
        spec.solver = Solver::Dp;
        assert!(fit(&d, &spec).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in [FitMethod::Enum, FitMethod::Nml, FitMethod::GEnum] {
            assert_eq!(m.to_string().parse::<FitMethod>().unwrap(), m);
        }
        for s in [Solver::Greedy, Solver::Dp] {
            assert_eq!(s.to_string().parse::<Solver>().unwrap(), s);
        }
    }
}
