//! Data ingestion and the fixed ε-grid.
//!
//! A grid of `E` ε-bins spans `]x_min − ε/2, x_max + ε/2]`. Bin `t` (1-based)
//! is the half-open cell `]c_{t−1}, c_t]` with `c_t = c_0 + t·ε`. Histogram
//! endpoints are grid endpoint indices in `0..=E`.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Sorted, finite univariate observations. Duplicates are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset from arbitrary-order values. Rejects empty input and
    /// non-finite values.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("dataset must contain at least one value"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value {bad}")));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.values[0]
    }

    pub fn x_max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Domain length `L = x_max − x_min`.
    pub fn domain_length(&self) -> f64 {
        self.x_max() - self.x_min()
    }

    /// Distinct values with their multiplicities, ascending.
    pub fn distinct(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &v in &self.values {
            match out.last_mut() {
                Some((last, count)) if *last == v => *count += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    /// Smallest gap between two distinct values, `None` with a single distinct value.
    pub fn min_gap(&self) -> Option<f64> {
        self.distinct()
            .windows(2)
            .map(|w| w[1].0 - w[0].0)
            .min_by(f64::total_cmp)
    }
}

/// Column selection for delimited input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Name(String),
    Index(usize),
}

impl FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_string()),
        })
    }
}

impl std::fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColumnSelector::Name(n) => write!(f, "{n:?}"),
            ColumnSelector::Index(i) => write!(f, "#{i}"),
        }
    }
}

/// Result of [`load_dataset`]: the data plus the number of rows skipped
/// because the selected field was missing, unparseable or non-finite.
#[derive(Debug, Clone)]
pub struct LoadReport {
    pub dataset: Dataset,
    pub skipped: usize,
    pub had_header: bool,
}

/// Reads one numeric column from a CSV or TSV file.
///
/// The delimiter is a tab when the first line contains one, a comma
/// otherwise. The first row is a header when the selected field does not
/// parse as a number (or, for name selection, always). A numeric selector
/// that matches a header name is resolved by name first.
pub fn load_dataset(path: &Path, column: &ColumnSelector) -> Result<LoadReport> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let first_line = {
        use std::io::BufRead;
        let mut reader = BufReader::new(File::open(path).map_err(io_err)?);
        let mut line = String::new();
        reader.read_line(&mut line).map_err(io_err)?;
        line
    };
    let delimiter = if first_line.contains('\t') { b'\t' } else { b',' };
    let file = File::open(path).map_err(io_err)?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::with_capacity(1 << 20, file));

    let mut records = reader.records();
    let mut values = Vec::new();
    let mut skipped = 0usize;

    let first = match records.next() {
        Some(r) => r?,
        None => return Err(Error::NoValues(column.to_string())),
    };
    let named_index = first.iter().position(|field| match column {
        ColumnSelector::Name(name) => field == name,
        ColumnSelector::Index(i) => field == i.to_string(),
    });
    let numeric = |field: Option<&str>| field.and_then(|f| f.parse::<f64>().ok());
    let (index, had_header) = match (column, named_index) {
        (_, Some(i)) if numeric(first.get(i)).is_none() => (i, true),
        (ColumnSelector::Name(name), _) => return Err(Error::ColumnMissing(name.clone())),
        (ColumnSelector::Index(i), _) => {
            if *i >= first.len() {
                return Err(Error::ColumnMissing(column.to_string()));
            }
            let header = numeric(first.get(*i)).is_none()
                && first.iter().any(|f| !f.is_empty() && f.parse::<f64>().is_err());
            (*i, header)
        }
    };

    let mut push = |field: Option<&str>| match numeric(field) {
        Some(v) if v.is_finite() => values.push(v),
        _ => skipped += 1,
    };
    if !had_header {
        push(first.get(index));
    }
    for record in records {
        let record = record?;
        push(record.get(index));
    }
    if values.is_empty() {
        return Err(Error::NoValues(column.to_string()));
    }
    Ok(LoadReport {
        dataset: Dataset::new(values)?,
        skipped,
        had_header,
    })
}

/// Fixed grid of `bins` cells of width `epsilon` starting at `origin` (`c_0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub epsilon: f64,
    pub bins: u64,
    pub origin: f64,
}

/// Number of ε-bins used by the G-Enum search.
pub const GENUM_BINS: u64 = 1 << 30;

impl GridSpec {
    /// Grid for a requested accuracy. `E = max(1, round(L/ε) + 1)` and ε is
    /// snapped to `L/(E−1)` so that `E·ε = L + ε`.
    pub fn with_accuracy(d: &Dataset, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        let length = d.domain_length();
        let steps = (length / epsilon).round();
        if steps >= (u64::MAX / 2) as f64 {
            return Err(Error::invalid(format!("epsilon {epsilon} too small for domain {length}")));
        }
        let bins = (steps as u64).saturating_add(1).max(1);
        Self::with_bins_inner(d, bins, epsilon)
    }

    /// Grid with a given number of ε-bins, `ε = L/(E−1)`.
    ///
    /// With `L = 0` the grid is a single cell of width 1 centred on the value,
    /// whatever `bins` says. With `E = 1` and `L > 0` the single cell is
    /// `]x_min − L/2, x_max + L/2]`.
    pub fn with_bins(d: &Dataset, bins: u64) -> Result<Self> {
        Self::with_bins_inner(d, bins, 1.0)
    }

    fn with_bins_inner(d: &Dataset, bins: u64, fallback_epsilon: f64) -> Result<Self> {
        if bins == 0 {
            return Err(Error::invalid("grid needs at least one bin"));
        }
        let length = d.domain_length();
        let (epsilon, origin, bins) = if length == 0.0 {
            let eps = fallback_epsilon;
            (eps, d.x_min() - eps / 2.0, 1)
        } else if bins == 1 {
            (2.0 * length, d.x_min() - length / 2.0, 1)
        } else {
            let eps = length / (bins - 1) as f64;
            (eps, d.x_min() - eps / 2.0, bins)
        };
        Ok(Self {
            epsilon,
            bins,
            origin,
        })
    }

    /// Endpoint `c_t`.
    pub fn endpoint(&self, t: u64) -> f64 {
        self.origin + t as f64 * self.epsilon
    }

    pub fn upper(&self) -> f64 {
        self.endpoint(self.bins)
    }

    /// 1-based index of the cell `]c_{t−1}, c_t]` holding `x`, clamped to `[1, E]`.
    pub fn bin_of(&self, x: f64) -> u64 {
        let t = ((x - self.origin) / self.epsilon).ceil();
        if t < 1.0 {
            1
        } else if t >= self.bins as f64 {
            self.bins
        } else {
            t as u64
        }
    }

    /// Grid whose cells aggregate `factor` consecutive cells of this one.
    pub fn coarsen(&self, factor: u64) -> Result<Self> {
        if factor == 0 || !self.bins.is_multiple_of(factor) {
            return Err(Error::invalid(format!(
                "coarsening factor {factor} does not divide {} bins",
                self.bins
            )));
        }
        Ok(Self {
            epsilon: self.epsilon * factor as f64,
            bins: self.bins / factor,
            origin: self.origin,
        })
    }
}

/// One occupied ε-bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupiedBin {
    pub index: u64,
    pub count: u64,
    pub min_value: f64,
    pub max_value: f64,
}

/// Sparse image of a dataset on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedData {
    bins: u64,
    occupied: Vec<OccupiedBin>,
    n: u64,
}

impl BinnedData {
    pub fn new(d: &Dataset, grid: &GridSpec) -> Self {
        let mut occupied: Vec<OccupiedBin> = Vec::new();
        // values are sorted, so bin indices are non-decreasing
        for &x in d.values() {
            let t = grid.bin_of(x);
            match occupied.last_mut() {
                Some(last) if last.index == t => {
                    last.count += 1;
                    last.max_value = x;
                }
                _ => occupied.push(OccupiedBin {
                    index: t,
                    count: 1,
                    min_value: x,
                    max_value: x,
                }),
            }
        }
        Self {
            bins: grid.bins,
            occupied,
            n: d.len() as u64,
        }
    }

    pub fn bins(&self) -> u64 {
        self.bins
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn occupied(&self) -> &[OccupiedBin] {
        &self.occupied
    }

    /// Count in bin `t`, zero when unoccupied.
    pub fn count(&self, t: u64) -> u64 {
        self.occupied
            .binary_search_by_key(&t, |b| b.index)
            .map(|i| self.occupied[i].count)
            .unwrap_or(0)
    }

    /// Number of observations in the endpoint range `]c_from, c_to]`.
    pub fn count_between(&self, from: u64, to: u64) -> u64 {
        let lo = self.occupied.partition_point(|b| b.index <= from);
        let hi = self.occupied.partition_point(|b| b.index <= to);
        self.occupied[lo..hi].iter().map(|b| b.count).sum()
    }

    /// Image on a grid coarsened by `factor` (see [`GridSpec::coarsen`]).
    pub fn coarsen(&self, factor: u64) -> Result<Self> {
        if factor == 0 || !self.bins.is_multiple_of(factor) {
            return Err(Error::invalid(format!(
                "coarsening factor {factor} does not divide {} bins",
                self.bins
            )));
        }
        let mut occupied: Vec<OccupiedBin> = Vec::new();
        for b in &self.occupied {
            let t = b.index.div_ceil(factor);
            match occupied.last_mut() {
                Some(last) if last.index == t => {
                    last.count += b.count;
                    last.max_value = b.max_value;
                }
                _ => occupied.push(OccupiedBin { index: t, ..*b }),
            }
        }
        Ok(Self {
            bins: self.bins / factor,
            occupied,
            n: self.n,
        })
    }
}

/// Candidate endpoints: for every occupied bin `t` the flanking endpoints
/// `t−1` and `t`, plus `0` and `E`. Sorted, deduplicated, at most
/// `2·(#occupied) + 2` entries.
pub fn candidate_cuts(bd: &BinnedData) -> Vec<u64> {
    let mut cuts = Vec::with_capacity(2 * bd.occupied.len() + 2);
    cuts.push(0);
    for b in &bd.occupied {
        cuts.push(b.index - 1);
        cuts.push(b.index);
    }
    cuts.push(bd.bins);
    cuts.dedup();
    cuts
}

/// Every endpoint `0..=E`.
pub fn full_cuts(bd: &BinnedData) -> Vec<u64> {
    (0..=bd.bins).collect()
}

/// An ordered set of admissible endpoints with cumulative counts, so the
/// count of any interval between two lattice positions is O(1).
#[derive(Debug, Clone)]
pub struct CutLattice {
    cuts: Vec<u64>,
    prefix: Vec<u64>,
    bins: u64,
}

impl CutLattice {
    /// `cuts` must be strictly increasing, start at 0 and end at `E`.
    pub fn new(bd: &BinnedData, cuts: Vec<u64>) -> Result<Self> {
        if cuts.first() != Some(&0) || cuts.last() != Some(&bd.bins) {
            return Err(Error::invalid("cut lattice must start at 0 and end at E"));
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) && cuts.len() > 1 {
            return Err(Error::invalid("cut lattice must be strictly increasing"));
        }
        let mut prefix = Vec::with_capacity(cuts.len());
        let mut acc = 0u64;
        let mut next = bd.occupied.iter().peekable();
        for &c in &cuts {
            while let Some(b) = next.next_if(|b| b.index <= c) {
                acc += b.count;
            }
            prefix.push(acc);
        }
        Ok(Self {
            cuts,
            prefix,
            bins: bd.bins,
        })
    }

    pub fn candidates(bd: &BinnedData) -> Self {
        Self::new(bd, candidate_cuts(bd)).expect("candidate cuts are a valid lattice")
    }

    pub fn full(bd: &BinnedData) -> Self {
        Self::new(bd, full_cuts(bd)).expect("the full grid is a valid lattice")
    }

    /// Number of lattice positions.
    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    /// Number of elementary lattice intervals.
    pub fn intervals(&self) -> usize {
        self.cuts.len() - 1
    }

    pub fn cut(&self, pos: usize) -> u64 {
        self.cuts[pos]
    }

    pub fn cuts(&self) -> &[u64] {
        &self.cuts
    }

    pub fn bins(&self) -> u64 {
        self.bins
    }

    pub fn n(&self) -> u64 {
        *self.prefix.last().unwrap_or(&0)
    }

    /// Count and width of the interval between positions `from <= to`.
    #[inline]
    pub fn span(&self, from: usize, to: usize) -> (u64, u64) {
        (
            self.prefix[to] - self.prefix[from],
            self.cuts[to] - self.cuts[from],
        )
    }
}
