//! G-Enum: Enum fits on power-of-two granularities of a very fine grid,
//! compared through the G-Enum criterion.

use std::time::Instant;

use rayon::prelude::*;

use super::{post_optimize, greedy_merge, FitMethod, FitResult};
use crate::criteria::{enum_cost, genum_cost, Criterion, GranularityContext, Scorer};
use crate::error::Result;
use crate::grid::{BinnedData, CutLattice, Dataset, GridSpec, GENUM_BINS};
use crate::model::HistogramModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenumOptions {
    /// ε-bins of the underlying grid; must be a power of two.
    pub full_bins: u64,
    /// Skip granularities above `factor · n`. `None` scans every power of two.
    ///
    /// The cap does not change the fit on distinct values, but with values
    /// repeated inside one ε-bin the optimum can sit at a finer granularity.
    pub max_granularity_factor: Option<u64>,
    pub post_optimize: bool,
    /// Fit the granularities on the rayon pool.
    pub parallel: bool,
}

impl Default for GenumOptions {
    fn default() -> Self {
        Self {
            full_bins: GENUM_BINS,
            max_granularity_factor: Some(4),
            post_optimize: true,
            parallel: true,
        }
    }
}

/// Best Enum histogram for one granularity, scored both ways.
#[derive(Debug, Clone)]
pub struct GranularityFit {
    pub granularity: u64,
    pub grid: GridSpec,
    pub model: HistogramModel,
    /// Enum criterion with `E = G`.
    pub enum_total: f64,
    /// G-Enum criterion.
    pub genum_total: f64,
}

/// The fine grid and the data binned on it.
#[derive(Debug, Clone)]
pub struct FineGrid {
    pub grid: GridSpec,
    pub binned: BinnedData,
    pub n: u64,
}

impl FineGrid {
    pub fn new(d: &Dataset, full_bins: u64) -> Result<Self> {
        let grid = GridSpec::with_bins(d, full_bins)?;
        Ok(Self {
            binned: BinnedData::new(d, &grid),
            grid,
            n: d.len() as u64,
        })
    }

    /// Greedy Enum fit (plus post-optimisation) with `G` g-bins.
    pub fn fit_granularity(&self, granularity: u64, post: bool) -> Result<GranularityFit> {
        let ctx = GranularityContext::new(self.grid.bins, granularity)?;
        let factor = ctx.bin_factor();
        let grid = self.grid.coarsen(factor)?;
        let binned = self.binned.coarsen(factor)?;
        let lattice = CutLattice::candidates(&binned);
        let scorer = Scorer::new(Criterion::Enum, self.n, granularity, lattice.intervals());
        let greedy = greedy_merge(&lattice, &scorer);
        let positions = if post {
            post_optimize(&lattice, &scorer, greedy.positions).positions
        } else {
            greedy.positions
        };
        let model = HistogramModel::from_lattice_positions(&lattice, &positions);
        let enum_total = scorer.total(&model);
        Ok(GranularityFit {
            granularity,
            grid,
            enum_total,
            genum_total: enum_total + ctx.granularity_cost(self.n),
            model,
        })
    }
}

/// Granularities scanned for `n` observations: `2^i` for `0 ≤ i ≤ log2 E`,
/// capped at `factor · n` when a factor is given (`G = 1` is always kept).
pub fn granularities(full_bins: u64, n: u64, max_factor: Option<u64>) -> Vec<u64> {
    let cap = max_factor.map(|f| f.saturating_mul(n).max(1));
    (0..=full_bins.trailing_zeros())
        .map(|i| 1u64 << i)
        .filter(|&g| g <= full_bins && cap.is_none_or(|c| g <= c))
        .collect()
}

/// Per-granularity fits, in increasing `G`.
pub fn genum_scan(d: &Dataset, opts: &GenumOptions) -> Result<Vec<GranularityFit>> {
    let fine = FineGrid::new(d, opts.full_bins)?;
    let gs = granularities(opts.full_bins, fine.n, opts.max_granularity_factor);
    if opts.parallel {
        gs.par_iter()
            .map(|&g| fine.fit_granularity(g, opts.post_optimize))
            .collect()
    } else {
        gs.iter()
            .map(|&g| fine.fit_granularity(g, opts.post_optimize))
            .collect()
    }
}

/// Minimum-G-Enum histogram over the scanned granularities. Ties go to the
/// smaller `G`.
pub fn genum_fit(d: &Dataset, opts: &GenumOptions) -> Result<FitResult> {
    let start = Instant::now();
    if !opts.full_bins.is_power_of_two() {
        return Err(crate::Error::invalid("G-Enum needs a power-of-two grid"));
    }
    let n = d.len() as u64;
    if d.domain_length() == 0.0 {
        // a zero-length domain only admits the trivial histogram
        let grid = GridSpec::with_bins(d, 1)?;
        let model = HistogramModel::single(1, n);
        let ctx = GranularityContext::new(opts.full_bins, 1)?;
        let cost = genum_cost(&model, n, &ctx)?;
        return Ok(FitResult {
            model,
            grid,
            cost,
            method: FitMethod::GEnum,
            granularity: Some(1),
            iterations: 0,
            elapsed: start.elapsed(),
        });
    }
    let fits = genum_scan(d, opts)?;
    let iterations = fits.len();
    let best = fits
        .into_iter()
        .min_by(|a, b| {
            a.genum_total
                .total_cmp(&b.genum_total)
                .then(a.granularity.cmp(&b.granularity))
        })
        .expect("at least one granularity is scanned");
    let ctx = GranularityContext::new(opts.full_bins, best.granularity)?;
    let cost = genum_cost(&best.model, n, &ctx)?;
    debug_assert!(
        (enum_cost(&best.model, n, best.granularity)?.total - best.enum_total).abs()
            < 1e-6 * best.enum_total.abs().max(1.0)
    );
    Ok(FitResult {
        model: best.model,
        grid: best.grid,
        cost,
        method: FitMethod::GEnum,
        granularity: Some(best.granularity),
        iterations,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn granularity_ladder() {
        assert_eq!(granularities(1 << 30, 10, None).len(), 31);
        assert_eq!(granularities(1 << 30, 10, Some(4)), vec![1, 2, 4, 8, 16, 32]);
        assert_eq!(granularities(8, 1000, Some(4)), vec![1, 2, 4, 8]);
    }

    #[test]
    fn constant_data_is_one_interval() {
        let d = Dataset::new(vec![2.5; 40]).unwrap();
        let fit = genum_fit(&d, &GenumOptions::default()).unwrap();
        assert_eq!(fit.model.k(), 1);
        assert_eq!(fit.granularity, Some(1));
    }

    #[test]
    fn single_observation() {
        let d = Dataset::new(vec![1.0]).unwrap();
        let fit = genum_fit(&d, &GenumOptions::default()).unwrap();
        assert_eq!(fit.model.k(), 1);
    }

    #[test]
    fn per_granularity_cost_identity() {
        let d = Dataset::new((0..200).map(|i| ((i * 37) % 101) as f64 / 7.0).collect()).unwrap();
        let fine = FineGrid::new(&d, 1 << 30).unwrap();
        for g in [1u64, 8, 256, 4096] {
            let fit = fine.fit_granularity(g, true).unwrap();
            let ctx = GranularityContext::new(1 << 30, g).unwrap();
            let direct = genum_cost(&fit.model, 200, &ctx).unwrap().total;
            assert!((direct - fit.genum_total).abs() < 1e-6 * direct);
        }
    }
}
