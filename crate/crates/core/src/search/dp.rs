use crate::criteria::Scorer;
use crate::error::{Error, Result};
use crate::grid::CutLattice;

/// Upper bound on `positions² · K_max` accepted by [`dp_optimal_on`].
pub const DEFAULT_DP_BUDGET: u128 = 100_000_000;

/// Precomputed interval costs are kept when the matrix has at most this many entries.
const LOCAL_MATRIX_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpOptions {
    /// Largest interval count considered; `None` means `min(2n − 2, positions − 1)`.
    pub k_max: Option<usize>,
    /// Allow several endpoints at the same lattice position (zero-width intervals).
    pub allow_zero_width: bool,
    pub budget: u128,
}

impl Default for DpOptions {
    fn default() -> Self {
        Self {
            k_max: None,
            allow_zero_width: false,
            budget: DEFAULT_DP_BUDGET,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DpOutcome {
    pub positions: Vec<usize>,
    pub cost: f64,
    pub k_max: usize,
}

/// Default interval-count bound: no optimal histogram has more than `2n − 2`
/// intervals, and a lattice cannot hold more than its elementary intervals.
pub fn default_k_max(n: u64, lattice: &CutLattice) -> usize {
    let by_n = (2 * n).saturating_sub(2) as usize;
    by_n.min(lattice.intervals()).max(1)
}

/// Exact minimum of an additive criterion over all histograms whose
/// endpoints lie on `lattice`, with at most `k_max` intervals. O(P²·K_max).
pub fn dp_optimal_on(lattice: &CutLattice, scorer: &Scorer, opts: &DpOptions) -> Result<DpOutcome> {
    let p = lattice.len();
    let last = p - 1;
    let k_max = opts
        .k_max
        .unwrap_or_else(|| default_k_max(scorer.n(), lattice))
        .max(1);
    let k_max = if opts.allow_zero_width { k_max } else { k_max.min(last.max(1)) };
    let states = (p as u128) * (p as u128) * k_max as u128;
    if states > opts.budget {
        return Err(Error::BudgetExceeded {
            states,
            budget: opts.budget,
        });
    }

    let matrix: Option<Vec<f64>> = (p * p <= LOCAL_MATRIX_LIMIT).then(|| {
        let mut m = vec![f64::INFINITY; p * p];
        for i in 0..p {
            for j in i..p {
                let (h, w) = lattice.span(i, j);
                m[i * p + j] = scorer.local(h, w);
            }
        }
        m
    });
    let local = |i: usize, j: usize| -> f64 {
        match &matrix {
            Some(m) => m[i * p + j],
            None => {
                let (h, w) = lattice.span(i, j);
                scorer.local(h, w)
            }
        }
    };

    // best[j]: cheapest sum of local costs covering [0, j] with k intervals
    let mut best: Vec<f64> = (0..p).map(|j| local(0, j)).collect();
    let mut parents: Vec<Vec<u32>> = Vec::with_capacity(k_max);
    parents.push(vec![0; p]);
    let mut best_k = 1;
    let mut best_total = scorer.global(1) + best[last];

    for k in 2..=k_max {
        let mut next = vec![f64::INFINITY; p];
        let mut parent = vec![0u32; p];
        for j in 0..p {
            let upper = if opts.allow_zero_width { j } else { j.saturating_sub(1) };
            if !opts.allow_zero_width && j == 0 {
                continue;
            }
            let mut acc = f64::INFINITY;
            let mut arg = 0u32;
            for (i, &b) in best.iter().enumerate().take(upper + 1) {
                let c = b + local(i, j);
                if c < acc {
                    acc = c;
                    arg = i as u32;
                }
            }
            next[j] = acc;
            parent[j] = arg;
        }
        best = next;
        parents.push(parent);
        let total = scorer.global(k) + best[last];
        if total < best_total {
            best_total = total;
            best_k = k;
        }
    }

    let mut positions = vec![last];
    let mut j = last;
    for k in (2..=best_k).rev() {
        j = parents[k - 1][j] as usize;
        positions.push(j);
    }
    positions.push(0);
    positions.reverse();
    Ok(DpOutcome {
        positions,
        cost: best_total,
        k_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::Criterion;
    use crate::grid::{BinnedData, Dataset, GridSpec};
    use crate::model::HistogramModel;

    /// Every composition of the lattice into intervals, brute force.
    fn brute_force(lattice: &CutLattice, scorer: &Scorer) -> f64 {
        let inner = lattice.len() - 2;
        let mut best = f64::INFINITY;
        for mask in 0u64..(1 << inner) {
            let mut pos = vec![0];
            for b in 0..inner {
                if mask >> b & 1 == 1 {
                    pos.push(b + 1);
                }
            }
            pos.push(lattice.len() - 1);
            let m = HistogramModel::from_lattice_positions(lattice, &pos);
            best = best.min(scorer.total(&m));
        }
        best
    }

    #[test]
    fn matches_exhaustive_enumeration() {
        let sets: [&[f64]; 4] = [
            &[0.0, 0.1, 0.11, 0.5, 0.9, 1.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.3],
            &[0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.0, 1.0],
        ];
        for values in sets {
            let d = Dataset::new(values.to_vec()).unwrap();
            let g = GridSpec::with_bins(&d, 12).unwrap();
            let bd = BinnedData::new(&d, &g);
            let lat = CutLattice::full(&bd);
            for criterion in [Criterion::Enum, Criterion::Nml] {
                let scorer = Scorer::new(criterion, bd.n(), bd.bins(), lat.intervals());
                let opts = DpOptions {
                    k_max: Some(lat.intervals()),
                    ..Default::default()
                };
                let out = dp_optimal_on(&lat, &scorer, &opts).unwrap();
                let oracle = brute_force(&lat, &scorer);
                assert!((out.cost - oracle).abs() < 1e-9, "{criterion}: {} vs {oracle}", out.cost);
                let m = HistogramModel::from_lattice_positions(&lat, &out.positions);
                assert!((scorer.total(&m) - out.cost).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn refuses_oversized_problems() {
        let values: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let d = Dataset::new(values).unwrap();
        let g = GridSpec::with_bins(&d, 5000).unwrap();
        let bd = BinnedData::new(&d, &g);
        let lat = CutLattice::full(&bd);
        let scorer = Scorer::new(Criterion::Enum, bd.n(), bd.bins(), 10);
        let err = dp_optimal_on(&lat, &scorer, &DpOptions::default()).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn zero_width_intervals_never_win() {
        let d = Dataset::new(vec![0.0, 0.0, 0.5, 0.55, 1.0]).unwrap();
        let g = GridSpec::with_bins(&d, 20).unwrap();
        let bd = BinnedData::new(&d, &g);
        let lat = CutLattice::full(&bd);
        let scorer = Scorer::new(Criterion::Enum, bd.n(), bd.bins(), 40);
        let opts = DpOptions {
            k_max: Some(24),
            allow_zero_width: true,
            ..Default::default()
        };
        let out = dp_optimal_on(&lat, &scorer, &opts).unwrap();
        assert!(out.positions.windows(2).all(|w| w[0] < w[1]));
    }
}
