//! MDL criteria for histograms on a fixed grid.
//!
//! All three criteria share the bin-index term `Σ h_k ln E_k` and differ in
//! how they price the model structure and the multinomial counts:
//!
//! | criterion | index terms | multinomial terms |
//! |-----------|-------------|-------------------|
//! | Enum   | `log* K + ln C(E+K−1, K−1)` | `ln C(n+K−1, K−1) + ln n!/Π h_k!` |
//! | G-Enum | `log* K + log* G + ln C(G+K−1, K−1)` | same as Enum |
//! | NML    | `ln C(E, K−1)` | `ln R(n, K) + n ln n − Σ h_k ln h_k` |
//!
//! G-Enum additionally pays `n ln(E/G)` in the bin-index group.
//!
//! Enum and NML are additive: `q1(n, K) + Σ_k q2(h_k, E_k)`. [`Scorer`]
//! exposes that split for the search code; the `*_cost` functions evaluate
//! each term group directly and serve as the reference.

pub mod combinatorics;
pub mod nml;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::HistogramModel;

use combinatorics::{count_ln_width, log_binomial_unchecked, log_factorial, log_star_unchecked, x_ln_x};
pub use combinatorics::{log_binomial, log_factorial as ln_factorial, log_multinomial, log_star};
pub use nml::{nml_parametric_complexity, NmlComplexityTable};

/// Criterion used to score fixed-grid histograms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Enum,
    Nml,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Enum => "enum",
            Criterion::Nml => "nml",
        })
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enum" => Ok(Criterion::Enum),
            "nml" => Ok(Criterion::Nml),
            other => Err(Error::invalid(format!("unknown criterion {other:?}"))),
        }
    }
}

/// Criterion value split into its three term groups, in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub index_terms: f64,
    pub multinomial_terms: f64,
    pub bin_index_terms: f64,
    pub total: f64,
}

impl CostBreakdown {
    fn from_terms(index_terms: f64, multinomial_terms: f64, bin_index_terms: f64) -> Self {
        Self {
            index_terms,
            multinomial_terms,
            bin_index_terms,
            total: index_terms + multinomial_terms + bin_index_terms,
        }
    }

    /// Cost of a model incompatible with the data.
    pub fn incompatible() -> Self {
        Self {
            index_terms: f64::INFINITY,
            multinomial_terms: f64::INFINITY,
            bin_index_terms: f64::INFINITY,
            total: f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.total.is_finite()
    }
}

fn bin_index_terms(m: &HistogramModel) -> f64 {
    m.counts()
        .iter()
        .zip(m.widths())
        .map(|(&h, w)| count_ln_width(h, w))
        .sum()
}

fn check_shape(m: &HistogramModel, n: u64, bins: u64) -> Result<()> {
    if m.n() != n {
        return Err(Error::invalid(format!("model counts sum to {}, expected {n}", m.n())));
    }
    if m.bins() != bins {
        return Err(Error::invalid(format!("model spans {} bins, expected {bins}", m.bins())));
    }
    Ok(())
}

/// Enum criterion of a model on `E = bins` cells.
pub fn enum_cost(m: &HistogramModel, n: u64, bins: u64) -> Result<CostBreakdown> {
    check_shape(m, n, bins)?;
    let bin_index = bin_index_terms(m);
    if bin_index.is_infinite() {
        return Ok(CostBreakdown::incompatible());
    }
    let k = m.k() as u64;
    let index = log_star_unchecked(k) + log_binomial_unchecked(bins + k - 1, k - 1);
    let multinomial = log_binomial_unchecked(n + k - 1, k - 1) + log_multinomial(n, m.counts())?;
    Ok(CostBreakdown::from_terms(index, multinomial, bin_index))
}

/// Granularity of a G-Enum model: `G` g-bins, each made of `E/G` ε-bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GranularityContext {
    full_bins: u64,
    granularity: u64,
}

impl GranularityContext {
    /// `granularity` must divide `full_bins`.
    pub fn new(full_bins: u64, granularity: u64) -> Result<Self> {
        if granularity == 0 || granularity > full_bins || !full_bins.is_multiple_of(granularity) {
            return Err(Error::invalid(format!(
                "granularity {granularity} does not divide {full_bins}"
            )));
        }
        Ok(Self {
            full_bins,
            granularity,
        })
    }

    pub fn full_bins(&self) -> u64 {
        self.full_bins
    }

    pub fn granularity(&self) -> u64 {
        self.granularity
    }

    /// ε-bins per g-bin.
    pub fn bin_factor(&self) -> u64 {
        self.full_bins / self.granularity
    }

    /// `log* G + n ln(E/G)`: what G-Enum adds to Enum evaluated with `E = G`.
    pub fn granularity_cost(&self, n: u64) -> f64 {
        log_star_unchecked(self.granularity) + n as f64 * (self.bin_factor() as f64).ln()
    }
}

/// G-Enum criterion of a model whose widths are counted in g-bins.
pub fn genum_cost(m: &HistogramModel, n: u64, ctx: &GranularityContext) -> Result<CostBreakdown> {
    check_shape(m, n, ctx.granularity)?;
    let bin_index = bin_index_terms(m);
    if bin_index.is_infinite() {
        return Ok(CostBreakdown::incompatible());
    }
    let k = m.k() as u64;
    let g = ctx.granularity;
    let index = log_star_unchecked(k) + log_star_unchecked(g) + log_binomial_unchecked(g + k - 1, k - 1);
    let multinomial = log_binomial_unchecked(n + k - 1, k - 1) + log_multinomial(n, m.counts())?;
    let bin_index = bin_index + n as f64 * (ctx.bin_factor() as f64).ln();
    Ok(CostBreakdown::from_terms(index, multinomial, bin_index))
}

/// NML criterion of a model on `E = bins` cells.
pub fn nml_cost(m: &HistogramModel, n: u64, bins: u64) -> Result<CostBreakdown> {
    check_shape(m, n, bins)?;
    let bin_index = bin_index_terms(m);
    if bin_index.is_infinite() {
        return Ok(CostBreakdown::incompatible());
    }
    let k = m.k() as u64;
    let index = if k - 1 > bins {
        f64::INFINITY
    } else {
        log_binomial_unchecked(bins, k - 1)
    };
    let likelihood = x_ln_x(n) - m.counts().iter().map(|&h| x_ln_x(h)).sum::<f64>();
    let multinomial = nml_parametric_complexity(n, m.k()) + likelihood;
    Ok(CostBreakdown::from_terms(index, multinomial, bin_index))
}

/// Cost of `m` under `criterion` on `bins` cells.
pub fn cost(criterion: Criterion, m: &HistogramModel, n: u64, bins: u64) -> Result<CostBreakdown> {
    match criterion {
        Criterion::Enum => enum_cost(m, n, bins),
        Criterion::Nml => nml_cost(m, n, bins),
    }
}

/// One interval as seen by a merge: its count and width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalStats {
    pub count: u64,
    pub width: u64,
}

/// `c(M_{K−1}) − c(M_K)` when adjacent intervals `a` and `b` of a `K`-interval
/// model are fused. O(1) for Enum, O(n + K) for NML.
pub fn merge_delta(
    criterion: Criterion,
    a: IntervalStats,
    b: IntervalStats,
    k: usize,
    n: u64,
    bins: u64,
) -> f64 {
    let scorer = Scorer::new(criterion, n, bins, k);
    let merged = scorer.local(a.count + b.count, a.width + b.width);
    scorer.merge_global_delta(k) + merged - scorer.local(a.count, a.width) - scorer.local(b.count, b.width)
}

/// Enum cost difference between the ideal two-interval histogram and the
/// single interval for `nθ` points uniform on `[0, α]` and `n(1−θ)` uniform
/// on `[α, 1]`, on a grid of `E` bins. Negative means two intervals win.
///
/// `nθ` is rounded to the nearest integer. Interval widths `αE` and `(1−α)E`
/// are used as real numbers.
pub fn delta_two_vs_one(n: u64, bins: u64, alpha: f64, theta: f64) -> f64 {
    let left = (n as f64 * theta).round() as u64;
    let right = n - left;
    let e = bins as f64;
    let spread = |h: u64, w: f64| if h == 0 { 0.0 } else { h as f64 * w.ln() };
    let two = log_star_unchecked(2)
        + (e + 1.0).ln()
        + ((n + 1) as f64).ln()
        + log_factorial(n)
        - log_factorial(left)
        - log_factorial(right)
        + spread(left, alpha * e)
        + spread(right, (1.0 - alpha) * e);
    let one = log_star_unchecked(1) + n as f64 * e.ln();
    two - one
}

/// The additive split `q1(n, K) + Σ q2(h_k, E_k)` of Enum or NML for fixed
/// `n` and `E`.
#[derive(Debug, Clone)]
pub struct Scorer {
    criterion: Criterion,
    n: u64,
    bins: u64,
    ln_n_factorial: f64,
    nml: Option<NmlComplexityTable>,
}

impl Scorer {
    /// `k_max` bounds the interval counts the scorer will be asked about
    /// (only NML precomputes anything with it).
    pub fn new(criterion: Criterion, n: u64, bins: u64, k_max: usize) -> Self {
        let nml = match criterion {
            Criterion::Nml => Some(NmlComplexityTable::new(n, k_max.max(1))),
            Criterion::Enum => None,
        };
        Self {
            criterion,
            n,
            bins,
            ln_n_factorial: log_factorial(n),
            nml,
        }
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn bins(&self) -> u64 {
        self.bins
    }

    /// `q1(n, K)`.
    pub fn global(&self, k: usize) -> f64 {
        let kk = k as u64;
        match &self.nml {
            None => {
                log_star_unchecked(kk)
                    + log_binomial_unchecked(self.bins + kk - 1, kk - 1)
                    + log_binomial_unchecked(self.n + kk - 1, kk - 1)
                    + self.ln_n_factorial
            }
            Some(table) => {
                if kk - 1 > self.bins {
                    return f64::INFINITY;
                }
                log_binomial_unchecked(self.bins, kk - 1) + table.get(k) + x_ln_x(self.n)
            }
        }
    }

    /// `q1(n, K−1) − q1(n, K)` in closed form, `K ≥ 2`.
    #[inline]
    pub fn merge_global_delta(&self, k: usize) -> f64 {
        debug_assert!(k >= 2);
        let km1 = (k - 1) as f64;
        match &self.nml {
            None => {
                (km1 / (self.bins as f64 + km1)).ln()
                    + (km1 / (self.n as f64 + km1)).ln()
                    + log_star_unchecked(k as u64 - 1)
                    - log_star_unchecked(k as u64)
            }
            Some(table) => {
                // C(E, K−2)/C(E, K−1) = (K−1)/(E−K+2)
                let index = if (k as u64) - 1 > self.bins {
                    f64::NEG_INFINITY
                } else {
                    (km1 / (self.bins as f64 - km1 + 1.0)).ln()
                };
                index + table.get(k - 1) - table.get(k)
            }
        }
    }

    /// `q2(h, w)`; `+∞` for a non-empty zero-width interval.
    #[inline]
    pub fn local(&self, count: u64, width: u64) -> f64 {
        let spread = count_ln_width(count, width);
        match self.criterion {
            Criterion::Enum => spread - log_factorial(count),
            Criterion::Nml => spread - x_ln_x(count),
        }
    }

    /// Full cost through the additive split.
    pub fn total(&self, m: &HistogramModel) -> f64 {
        self.global(m.k())
            + m.counts()
                .iter()
                .zip(m.widths())
                .map(|(&h, w)| self.local(h, w))
                .sum::<f64>()
    }

    pub fn breakdown(&self, m: &HistogramModel) -> Result<CostBreakdown> {
        cost(self.criterion, m, self.n, self.bins)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use combinatorics::log_star;
    use std::f64::consts::LN_2;

    fn model(cuts: &[u64], counts: &[u64]) -> HistogramModel {
        HistogramModel::new(cuts.to_vec(), counts.to_vec()).unwrap()
    }

    fn ln_fact(k: u64) -> f64 {
        (1..=k).map(|i| (i as f64).ln()).sum()
    }

    fn ln_choose(a: u64, b: u64) -> f64 {
        ln_fact(a) - ln_fact(b) - ln_fact(a - b)
    }

    #[test]
    fn single_interval_costs() {
        let (n, e) = (37u64, 512u64);
        let m = HistogramModel::single(e, n);
        let c = enum_cost(&m, n, e).unwrap();
        assert!((c.total - (log_star(1).unwrap() + n as f64 * (e as f64).ln())).abs() < 1e-9);
        let c = nml_cost(&m, n, e).unwrap();
        assert!((c.total - n as f64 * (e as f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn breakdown_sums_to_total() {
        let m = model(&[0, 3, 7, 20], &[4, 0, 9]);
        for c in [
            enum_cost(&m, 13, 20).unwrap(),
            nml_cost(&m, 13, 20).unwrap(),
            genum_cost(&m, 13, &GranularityContext::new(80, 20).unwrap()).unwrap(),
        ] {
            let sum = c.index_terms + c.multinomial_terms + c.bin_index_terms;
            assert!((sum - c.total).abs() <= 1e-10 * c.total.abs());
        }
    }

    #[test]
    fn enum_matches_direct_formula() {
        let m = model(&[0, 2, 5, 9], &[3, 1, 2]);
        let (n, e, k) = (6u64, 9u64, 3u64);
        let direct = log_star(k).unwrap()
            + ln_choose(e + k - 1, k - 1)
            + ln_choose(n + k - 1, k - 1)
            + ln_fact(6)
            - ln_fact(3)
            - ln_fact(1)
            - ln_fact(2)
            + 3.0 * 2f64.ln()
            + 3f64.ln()
            + 2.0 * 4f64.ln();
        assert!((enum_cost(&m, n, e).unwrap().total - direct).abs() < 1e-10);
    }

    #[test]
    fn nml_matches_direct_formula() {
        // n=4, E=8, K=2, h=[3,1], widths [4,4]
        let m = model(&[0, 4, 8], &[3, 1]);
        let r2 = {
            // Σ_h C(4,h) (h/4)^h ((4−h)/4)^(4−h)
            let mut s = 0.0;
            for h in 0..=4u32 {
                let c = [1.0, 4.0, 6.0, 4.0, 1.0][h as usize];
                let p = h as f64 / 4.0;
                s += c * p.powi(h as i32) * (1.0 - p).powi(4 - h as i32);
            }
            s
        };
        let direct = 8f64.ln()
            + r2.ln()
            + 4.0 * 4f64.ln()
            - 3.0 * 3f64.ln()
            + 4.0 * 4f64.ln();
        let got = nml_cost(&m, 4, 8).unwrap();
        assert!((got.total - direct).abs() < 1e-12, "{} vs {direct}", got.total);
    }

    #[test]
    fn nml_and_enum_share_bin_index_terms() {
        let m = model(&[0, 1, 6, 7, 30], &[2, 0, 5, 11]);
        let a = enum_cost(&m, 18, 30).unwrap();
        let b = nml_cost(&m, 18, 30).unwrap();
        assert_eq!(a.bin_index_terms, b.bin_index_terms);
    }

    #[test]
    fn incompatible_models_are_infinite() {
        let m = model(&[0, 4, 4, 8], &[1, 2, 1]);
        assert!(!enum_cost(&m, 4, 8).unwrap().is_finite());
        assert!(!nml_cost(&m, 4, 8).unwrap().is_finite());
        // zero-width empty intervals are fine
        let m = model(&[0, 4, 4, 8], &[1, 0, 3]);
        assert!(enum_cost(&m, 4, 8).unwrap().is_finite());
        assert!(enum_cost(&m, 5, 8).is_err());
    }

    #[test]
    fn genum_identity_with_enum() {
        let full = 1u64 << 30;
        for &(g, cuts, counts) in &[
            (16u64, &[0u64, 3, 4, 16][..], &[5u64, 1, 7][..]),
            (1024, &[0, 100, 101, 700, 1024], &[10, 0, 3, 1]),
            (full, &[0, 1 << 29, full], &[2, 2]),
        ] {
            let m = model(cuts, counts);
            let n = m.n();
            let ctx = GranularityContext::new(full, g).unwrap();
            let lhs = genum_cost(&m, n, &ctx).unwrap().total;
            let rhs = enum_cost(&m, n, g).unwrap().total + log_star(g).unwrap()
                + n as f64 * ((full / g) as f64).ln();
            assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0), "G={g}");
        }
        let ctx = GranularityContext::new(full, full).unwrap();
        assert_eq!(ctx.granularity_cost(5), log_star(full).unwrap());
        assert!(GranularityContext::new(full, 3).is_err());
    }

    #[test]
    fn genum_single_interval() {
        let full = 1u64 << 30;
        let n = 50;
        for g in [1u64, 2, 1 << 12, full] {
            let ctx = GranularityContext::new(full, g).unwrap();
            let c = genum_cost(&HistogramModel::single(g, n), n, &ctx).unwrap();
            let expected = log_star(1).unwrap() + log_star(g).unwrap() + n as f64 * (full as f64).ln();
            assert!((c.total - expected).abs() < 1e-8, "G={g}");
        }
    }

    #[test]
    fn merge_delta_matches_recomputation() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let k = rng.random_range(2..12usize);
            let widths: Vec<u64> = (0..k).map(|_| rng.random_range(1..40u64)).collect();
            let counts: Vec<u64> = (0..k)
                .map(|_| if rng.random_bool(0.3) { 0 } else { rng.random_range(0..30u64) })
                .collect();
            let mut cuts = vec![0u64];
            for w in &widths {
                cuts.push(cuts.last().unwrap() + w);
            }
            let n: u64 = counts.iter().sum();
            let e = *cuts.last().unwrap();
            let i = rng.random_range(0..k - 1);
            let before = model(&cuts, &counts);
            let mut merged_cuts = cuts.clone();
            merged_cuts.remove(i + 1);
            let mut merged_counts = counts.clone();
            let moved = merged_counts.remove(i + 1);
            merged_counts[i] += moved;
            let after = model(&merged_cuts, &merged_counts);
            let a = IntervalStats { count: counts[i], width: widths[i] };
            let b = IntervalStats { count: counts[i + 1], width: widths[i + 1] };
            for criterion in [Criterion::Enum, Criterion::Nml] {
                let expected = cost(criterion, &after, n, e).unwrap().total
                    - cost(criterion, &before, n, e).unwrap().total;
                let got = merge_delta(criterion, a, b, k, n, e);
                assert!((got - expected).abs() < 1e-9, "{criterion}: {got} vs {expected}");
            }
        }
    }

    #[test]
    fn merging_two_empty_intervals_always_helps() {
        let empty = IntervalStats { count: 0, width: 3 };
        for k in 2..50 {
            for (n, e) in [(1u64, 2u64), (10, 100), (1000, 1 << 20)] {
                assert!(merge_delta(Criterion::Enum, empty, empty, k, n, e) < 0.0);
            }
        }
    }

    #[test]
    fn merge_delta_is_symmetric_for_equal_intervals() {
        let a = IntervalStats { count: 4, width: 7 };
        let b = IntervalStats { count: 9, width: 2 };
        for criterion in [Criterion::Enum, Criterion::Nml] {
            let ab = merge_delta(criterion, a, b, 5, 30, 64);
            let ba = merge_delta(criterion, b, a, 5, 30, 64);
            assert_eq!(ab, ba);
        }
    }

    #[test]
    fn scorer_global_delta_matches_difference() {
        for criterion in [Criterion::Enum, Criterion::Nml] {
            let s = Scorer::new(criterion, 25, 40, 41);
            for k in 2..=41 {
                let expected = s.global(k - 1) - s.global(k);
                let got = s.merge_global_delta(k);
                assert!((got - expected).abs() < 1e-9, "{criterion} K={k}");
            }
        }
    }

    #[test]
    fn scorer_total_matches_breakdown() {
        let m = model(&[0, 2, 9, 10, 31], &[3, 0, 6, 2]);
        for criterion in [Criterion::Enum, Criterion::Nml] {
            let s = Scorer::new(criterion, 11, 31, 8);
            let reference = s.breakdown(&m).unwrap().total;
            assert!((s.total(&m) - reference).abs() < 1e-10);
        }
    }

    #[test]
    fn two_vs_one_reduces_to_closed_form() {
        // ln(E+1) + ln(n+1) + ln C(n, n/2) + n/2 ln α + n/2 ln(1−α) + ln 2
        let (n, e, a) = (10u64, 50u64, 0.1f64);
        let expected = LN_2
            + (e as f64 + 1.0).ln()
            + 11f64.ln()
            + ln_choose(10, 5)
            + 5.0 * a.ln()
            + 5.0 * (1.0 - a).ln();
        assert!((delta_two_vs_one(n, e, a, 0.5) - expected).abs() < 1e-10);
    }

    #[test]
    fn criterion_parsing() {
        assert_eq!("enum".parse::<Criterion>().unwrap(), Criterion::Enum);
        assert_eq!("nml".parse::<Criterion>().unwrap(), Criterion::Nml);
        assert!("bic".parse::<Criterion>().is_err());
    }
}
