use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::criteria::Scorer;
use crate::grid::CutLattice;

const NONE: usize = usize::MAX;

/// Pending merge of the interval starting at `left` with its right neighbour.
///
/// Only the local part of the delta is queued: the `K`-dependent part is the
/// same for every adjacent pair, so it does not affect the ordering.
#[derive(Debug, Clone, Copy)]
struct PendingMerge {
    delta: f64,
    left: usize,
    version: u32,
}

impl PartialEq for PendingMerge {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for PendingMerge {}

impl Ord for PendingMerge {
    // BinaryHeap is a max-heap: the smallest (delta, left) must compare greatest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .delta
            .total_cmp(&self.delta)
            .then_with(|| other.left.cmp(&self.left))
    }
}

impl PartialOrd for PendingMerge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One applied merge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeStep {
    /// Lattice position of the endpoint that disappeared.
    pub removed: usize,
    /// Cost after the merge.
    pub cost: f64,
}

/// Intervals of the bottom-up merge, a queue of candidate merges, and the
/// running cost.
///
/// Intervals are keyed by the lattice position of their left endpoint, which
/// never changes when an interval absorbs its right neighbour.
pub struct SearchState<'a> {
    lattice: &'a CutLattice,
    scorer: &'a Scorer,
    next: Vec<usize>,
    prev: Vec<usize>,
    count: Vec<u64>,
    width: Vec<u64>,
    local: Vec<f64>,
    version: Vec<u32>,
    queue: BinaryHeap<PendingMerge>,
    k: usize,
    cost: f64,
}

impl<'a> SearchState<'a> {
    /// One interval per consecutive pair of lattice positions, every adjacent
    /// pair queued.
    pub fn new(lattice: &'a CutLattice, scorer: &'a Scorer) -> Self {
        let m = lattice.intervals();
        let mut count = Vec::with_capacity(m);
        let mut width = Vec::with_capacity(m);
        let mut local = Vec::with_capacity(m);
        for p in 0..m {
            let (h, w) = lattice.span(p, p + 1);
            count.push(h);
            width.push(w);
            local.push(scorer.local(h, w));
        }
        let cost = scorer.global(m) + local.iter().sum::<f64>();
        let mut state = Self {
            lattice,
            scorer,
            next: (1..=m).collect(),
            prev: (0..m).map(|p| if p == 0 { NONE } else { p - 1 }).collect(),
            count,
            width,
            local,
            version: vec![0; m],
            queue: BinaryHeap::with_capacity(m),
            k: m,
            cost,
        };
        for p in 0..m.saturating_sub(1) {
            state.enqueue(p);
        }
        state
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// Queued merges, stale entries included.
    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    /// Lattice positions of the current endpoints.
    pub fn positions(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.k + 1);
        let mut p = 0;
        while p < self.lattice.intervals() {
            out.push(p);
            p = self.next[p];
        }
        out.push(self.lattice.intervals());
        out
    }

    fn local_delta(&self, left: usize) -> f64 {
        let right = self.next[left];
        let merged = self
            .scorer
            .local(self.count[left] + self.count[right], self.width[left] + self.width[right]);
        merged - self.local[left] - self.local[right]
    }

    fn enqueue(&mut self, left: usize) {
        let delta = self.local_delta(left);
        self.queue.push(PendingMerge {
            delta,
            left,
            version: self.version[left],
        });
    }

    fn is_current(&self, entry: &PendingMerge) -> bool {
        let m = self.lattice.intervals();
        entry.version == self.version[entry.left] && self.next[entry.left] < m && self.next[entry.left] != NONE
    }

    /// Applies the best queued merge; `None` once a single interval remains.
    pub fn merge_best(&mut self) -> Option<MergeStep> {
        if self.k <= 1 {
            return None;
        }
        let entry = loop {
            let entry = self.queue.pop()?;
            if self.is_current(&entry) {
                break entry;
            }
        };
        Some(self.merge_at(entry.left, entry.delta))
    }

    /// Fuses the interval starting at `left` with its right neighbour.
    pub fn merge(&mut self, left: usize) -> MergeStep {
        assert!(self.next[left] < self.lattice.intervals(), "no right neighbour");
        let delta = self.local_delta(left);
        self.merge_at(left, delta)
    }

    fn merge_at(&mut self, left: usize, local_delta: f64) -> MergeStep {
        let m = self.lattice.intervals();
        let right = self.next[left];
        self.cost += self.scorer.merge_global_delta(self.k) + local_delta;
        self.k -= 1;

        self.count[left] += self.count[right];
        self.width[left] += self.width[right];
        self.local[left] = self.scorer.local(self.count[left], self.width[left]);
        self.next[left] = self.next[right];
        if self.next[left] < m {
            self.prev[self.next[left]] = left;
        }
        self.next[right] = NONE;
        self.version[right] = self.version[right].wrapping_add(1);
        self.version[left] = self.version[left].wrapping_add(1);

        if self.next[left] < m {
            self.enqueue(left);
        }
        let before = self.prev[left];
        if before != NONE {
            self.version[before] = self.version[before].wrapping_add(1);
            self.enqueue(before);
        }
        MergeStep {
            removed: right,
            cost: self.cost,
        }
    }
}

/// Outcome of merging all the way down to one interval.
#[derive(Debug, Clone)]
pub struct GreedyOutcome {
    pub positions: Vec<usize>,
    pub cost: f64,
    pub merges: usize,
}

/// Bottom-up greedy merge down to a single interval, keeping the cheapest
/// histogram seen along the way.
pub fn greedy_merge(lattice: &CutLattice, scorer: &Scorer) -> GreedyOutcome {
    let mut state = SearchState::new(lattice, scorer);
    let mut best_cost = state.cost();
    let mut best_step = 0usize;
    let mut removed = Vec::with_capacity(lattice.intervals());
    while let Some(step) = state.merge_best() {
        removed.push(step.removed);
        if step.cost < best_cost {
            best_cost = step.cost;
            best_step = removed.len();
        }
    }
    let mut keep = vec![true; lattice.len()];
    for &p in &removed[..best_step] {
        keep[p] = false;
    }
    let positions = (0..lattice.len()).filter(|&p| keep[p]).collect();
    GreedyOutcome {
        positions,
        cost: best_cost,
        merges: removed.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::Criterion;
    use crate::grid::{BinnedData, Dataset, GridSpec};
    use crate::model::HistogramModel;

    fn setup(values: &[f64], bins: u64) -> (BinnedData, CutLattice) {
        let d = Dataset::new(values.to_vec()).unwrap();
        let g = GridSpec::with_bins(&d, bins).unwrap();
        let bd = BinnedData::new(&d, &g);
        let lat = CutLattice::full(&bd);
        (bd, lat)
    }

    #[test]
    fn initial_state_counts() {
        let values: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let (bd, lat) = setup(&values, 8);
        let scorer = Scorer::new(Criterion::Enum, bd.n(), bd.bins(), lat.intervals());
        let state = SearchState::new(&lat, &scorer);
        assert_eq!(state.k(), 8);
        assert_eq!(state.queue_len(), 7);

        let (bd, _) = setup(&[1.0], 1);
        let lat = CutLattice::candidates(&bd);
        let scorer = Scorer::new(Criterion::Enum, 1, 1, 1);
        let state = SearchState::new(&lat, &scorer);
        assert_eq!((state.k(), state.queue_len()), (1, 0));
    }

    #[test]
    fn running_cost_tracks_recomputation() {
        let values = [0.0, 0.1, 0.15, 0.2, 0.8, 0.81, 0.82, 0.9, 1.0, 1.0];
        let (bd, lat) = setup(&values, 40);
        for criterion in [Criterion::Enum, Criterion::Nml] {
            let scorer = Scorer::new(criterion, bd.n(), bd.bins(), lat.intervals());
            let mut state = SearchState::new(&lat, &scorer);
            while state.merge_best().is_some() {
                let m = HistogramModel::from_lattice_positions(&lat, &state.positions());
                let full = scorer.breakdown(&m).unwrap().total;
                assert!((state.cost() - full).abs() < 1e-9);
            }
            assert_eq!(state.k(), 1);
        }
    }

    #[test]
    fn best_of_merge_path_is_tracked() {
        let values = [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 5.0];
        let (bd, lat) = setup(&values, 30);
        let scorer = Scorer::new(Criterion::Enum, bd.n(), bd.bins(), lat.intervals());
        let out = greedy_merge(&lat, &scorer);
        let m = HistogramModel::from_lattice_positions(&lat, &out.positions);
        assert!((scorer.total(&m) - out.cost).abs() < 1e-9);
        assert_eq!(out.merges, lat.intervals() - 1);
        // never worse than the single interval
        assert!(out.cost <= scorer.total(&HistogramModel::single(30, 9)) + 1e-9);
    }

    #[test]
    fn queue_order_breaks_ties_by_position() {
        let a = PendingMerge { delta: 1.0, left: 3, version: 0 };
        let b = PendingMerge { delta: 1.0, left: 1, version: 0 };
        let c = PendingMerge { delta: 0.5, left: 9, version: 0 };
        let mut heap: BinaryHeap<_> = [a, b, c].into_iter().collect();
        assert_eq!(heap.pop().unwrap().left, 9);
        assert_eq!(heap.pop().unwrap().left, 1);
        assert_eq!(heap.pop().unwrap().left, 3);
    }
}
