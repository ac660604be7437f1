use crate::error::{Error, Result};
use crate::grid::{BinnedData, CutLattice, GridSpec};

/// A histogram on a grid: `K` intervals `]c_{t_{k−1}}, c_{t_k}]` given by
/// endpoint indices `t_0 = 0 ≤ … ≤ t_K = E`, with one count per interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistogramModel {
    cuts: Vec<u64>,
    counts: Vec<u64>,
}

impl HistogramModel {
    /// Zero-width intervals are representable, decreasing cuts are not.
    pub fn new(cuts: Vec<u64>, counts: Vec<u64>) -> Result<Self> {
        if cuts.len() < 2 || cuts[0] != 0 {
            return Err(Error::invalid("a histogram needs endpoints starting at 0"));
        }
        if counts.len() + 1 != cuts.len() {
            return Err(Error::invalid(format!(
                "{} endpoints need {} counts, got {}",
                cuts.len(),
                cuts.len() - 1,
                counts.len()
            )));
        }
        if cuts.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("endpoints must be non-decreasing"));
        }
        Ok(Self { cuts, counts })
    }

    /// The maximum-likelihood model on the given endpoints: counts read off the data.
    pub fn from_cuts(cuts: Vec<u64>, bd: &BinnedData) -> Result<Self> {
        if cuts.last() != Some(&bd.bins()) {
            return Err(Error::invalid("last endpoint must equal the bin count"));
        }
        let counts = cuts
            .windows(2)
            .map(|w| bd.count_between(w[0], w[1]))
            .collect();
        Self::new(cuts, counts)
    }

    pub(crate) fn from_lattice_positions(lattice: &CutLattice, positions: &[usize]) -> Self {
        let cuts = positions.iter().map(|&p| lattice.cut(p)).collect();
        let counts = positions
            .windows(2)
            .map(|w| lattice.span(w[0], w[1]).0)
            .collect();
        Self { cuts, counts }
    }

    /// Single interval holding all `n` observations on `bins` cells.
    pub fn single(bins: u64, n: u64) -> Self {
        Self {
            cuts: vec![0, bins],
            counts: vec![n],
        }
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn n(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Total width `E`.
    pub fn bins(&self) -> u64 {
        self.cuts[self.cuts.len() - 1]
    }

    pub fn cuts(&self) -> &[u64] {
        &self.cuts
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn widths(&self) -> Vec<u64> {
        self.cuts.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Whether every interval count matches the data (the likelihood is non-zero).
    pub fn is_compatible(&self, bd: &BinnedData) -> bool {
        self.bins() == bd.bins()
            && self
                .cuts
                .windows(2)
                .zip(&self.counts)
                .all(|(w, &h)| bd.count_between(w[0], w[1]) == h)
    }

    /// Piecewise-constant density `h_k / (n ε E_k)` on `]c_{k−1}, c_k]`, zero elsewhere.
    pub fn density_at(&self, grid: &GridSpec, x: f64) -> f64 {
        let n = self.n();
        if n == 0 || x.is_nan() || x <= grid.origin || x > grid.endpoint(self.bins()) {
            return 0.0;
        }
        // first interval whose right endpoint is >= x
        let k = self
            .cuts
            .partition_point(|&t| grid.endpoint(t) < x)
            .clamp(1, self.counts.len());
        self.interval_density(grid, k - 1)
    }

    /// Density of interval `k` (0-based); zero for zero-width intervals.
    pub fn interval_density(&self, grid: &GridSpec, k: usize) -> f64 {
        let width = self.cuts[k + 1] - self.cuts[k];
        if width == 0 {
            return 0.0;
        }
        self.counts[k] as f64 / (self.n() as f64 * grid.epsilon * width as f64)
    }

    /// `S(M, D)`: observations in non-empty one-bin intervals whose values
    /// are all identical.
    pub fn count_singular(&self, bd: &BinnedData) -> u64 {
        self.cuts
            .windows(2)
            .zip(&self.counts)
            .filter(|(w, &h)| h > 0 && w[1] - w[0] == 1)
            .filter_map(|(w, &h)| {
                let idx = bd.occupied().binary_search_by_key(&w[1], |b| b.index).ok()?;
                let bin = bd.occupied()[idx];
                (bin.min_value == bin.max_value).then_some(h)
            })
            .sum()
    }
}
