//! Local hill-climbing on a histogram's endpoints.
//!
//! Moves, all restricted to lattice positions:
//! - split an interval at its best inner position,
//! - merge two adjacent intervals,
//! - move the boundary between two adjacent intervals to its best position,
//! - merge three adjacent intervals and re-split them in two at the best position.
//!
//! Each sweep walks the intervals left to right and applies the best
//! improving move anchored at the current interval. Sweeps repeat until none
//! improves, at most [`MAX_SWEEPS`] times.

use crate::criteria::Scorer;
use crate::grid::CutLattice;

pub const MAX_SWEEPS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Move {
    Split { at: usize },
    Merge,
    Shift { to: usize },
    MergeMergeSplit { at: usize },
}

/// Result of [`post_optimize`].
#[derive(Debug, Clone)]
pub struct PostOutcome {
    pub positions: Vec<usize>,
    pub cost: f64,
    pub moves: usize,
    pub sweeps: usize,
}

struct Evaluator<'a> {
    lattice: &'a CutLattice,
    scorer: &'a Scorer,
}

impl Evaluator<'_> {
    #[inline]
    fn local(&self, from: usize, to: usize) -> f64 {
        let (h, w) = self.lattice.span(from, to);
        self.scorer.local(h, w)
    }

    /// Cheapest two-interval cover of `[from, to]` with an inner boundary,
    /// excluding `skip`.
    fn best_inner(&self, from: usize, to: usize, skip: Option<usize>) -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for p in from + 1..to {
            if Some(p) == skip {
                continue;
            }
            let c = self.local(from, p) + self.local(p, to);
            if best.is_none_or(|(b, _)| c < b) {
                best = Some((c, p));
            }
        }
        best
    }
}

/// Improves `positions` (lattice positions, first 0, last `lattice.intervals()`)
/// until no move lowers the cost. The cost never increases.
pub fn post_optimize(lattice: &CutLattice, scorer: &Scorer, positions: Vec<usize>) -> PostOutcome {
    let eval = Evaluator { lattice, scorer };
    let mut pos = positions;
    let locals = |pos: &[usize]| pos.windows(2).map(|w| eval.local(w[0], w[1])).sum::<f64>();
    let initial = scorer.global(pos.len() - 1) + locals(&pos);
    let tolerance = 1e-9 * initial.abs().max(1.0);
    let mut moves = 0;
    let mut sweeps = 0;

    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut improved = false;
        let mut i = 0;
        while i + 1 < pos.len() {
            let k = pos.len() - 1;
            let (a, b) = (pos[i], pos[i + 1]);
            let l_ab = eval.local(a, b);
            let mut best: Option<(f64, Move)> = None;
            let mut consider = |delta: f64, mv: Move| {
                if best.is_none_or(|(d, _)| delta < d) {
                    best = Some((delta, mv));
                }
            };

            if let Some((c, at)) = eval.best_inner(a, b, None) {
                consider(c - l_ab - scorer.merge_global_delta(k + 1), Move::Split { at });
            }
            if i + 2 < pos.len() {
                let c = pos[i + 2];
                let l_bc = eval.local(b, c);
                let merge_global = scorer.merge_global_delta(k);
                consider(merge_global + eval.local(a, c) - l_ab - l_bc, Move::Merge);
                if let Some((cost2, to)) = eval.best_inner(a, c, Some(b)) {
                    consider(cost2 - l_ab - l_bc, Move::Shift { to });
                }
                if i + 3 < pos.len() {
                    let d = pos[i + 3];
                    if let Some((cost2, at)) = eval.best_inner(a, d, None) {
                        let l_cd = eval.local(c, d);
                        consider(merge_global + cost2 - l_ab - l_bc - l_cd, Move::MergeMergeSplit { at });
                    }
                }
            }

            match best {
                Some((delta, mv)) if delta < -tolerance => {
                    match mv {
                        Move::Split { at } => pos.insert(i + 1, at),
                        Move::Merge => {
                            pos.remove(i + 1);
                        }
                        Move::Shift { to } => pos[i + 1] = to,
                        Move::MergeMergeSplit { at } => {
                            pos.remove(i + 2);
                            pos[i + 1] = at;
                        }
                    }
                    moves += 1;
                    improved = true;
                }
                _ => i += 1,
            }
        }
        if !improved {
            break;
        }
    }
    // re-derive the cost to drop accumulated rounding
    let cost = scorer.global(pos.len() - 1) + locals(&pos);
    PostOutcome {
        positions: pos,
        cost,
        moves,
        sweeps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::Criterion;
    use crate::grid::{BinnedData, Dataset, GridSpec};

    fn lattice(values: &[f64], bins: u64) -> CutLattice {
        let d = Dataset::new(values.to_vec()).unwrap();
        let g = GridSpec::with_bins(&d, bins).unwrap();
        CutLattice::full(&BinnedData::new(&d, &g))
    }

    #[test]
    fn repairs_a_bad_split() {
        // one point at 0, nineteen at 1: the best model isolates the left point
        let mut values = vec![1.0; 19];
        values.push(0.0);
        let lat = lattice(&values, 100);
        let scorer = Scorer::new(Criterion::Enum, 20, 100, lat.intervals());
        let out = post_optimize(&lat, &scorer, vec![0, 50, 100]);
        assert_eq!(out.positions, vec![0, 99, 100]);
        assert!(out.moves >= 1);
    }

    #[test]
    fn never_increases_cost() {
        let values = [0.0, 0.05, 0.1, 0.4, 0.42, 0.43, 0.9, 1.0];
        let lat = lattice(&values, 50);
        for criterion in [Criterion::Enum, Criterion::Nml] {
            let scorer = Scorer::new(criterion, 8, 50, lat.intervals());
            for start in [vec![0, 50], vec![0, 10, 20, 30, 40, 50], (0..=50).collect()] {
                let before = scorer.global(start.len() - 1)
                    + start
                        .windows(2)
                        .map(|w| {
                            let (h, wd) = lat.span(w[0], w[1]);
                            scorer.local(h, wd)
                        })
                        .sum::<f64>();
                let out = post_optimize(&lat, &scorer, start);
                assert!(out.cost <= before + 1e-9);
            }
        }
    }
}
