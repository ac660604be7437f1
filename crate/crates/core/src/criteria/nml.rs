//! Exact NML parametric complexity of the multinomial family.
//!
//! `R(n, K) = Σ_{h_1+…+h_K=n} n!/Π h_k! · Π (h_k/n)^{h_k}` satisfies
//! `R(n, 1) = 1`, `R(n, 2) = Σ_h C(n,h) (h/n)^h ((n−h)/n)^{n−h}` and
//! `R(n, K+2) = R(n, K+1) + (n/K)·R(n, K)`. Everything is evaluated in log space.

use super::combinatorics::log_binomial_unchecked;

fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln R(n, 2)` by direct summation, O(n).
fn log_complexity_two(n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let terms = (0..=n).map(|h| {
        let rest = n - h;
        let mut t = log_binomial_unchecked(n, h);
        if h > 0 {
            t += h as f64 * (h as f64 / nf).ln();
        }
        if rest > 0 {
            t += rest as f64 * (rest as f64 / nf).ln();
        }
        t
    });
    let terms: Vec<f64> = terms.collect();
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `ln R(n, K)` for every `K` in `1..=k_max`, in O(n + k_max).
#[derive(Debug, Clone)]
pub struct NmlComplexityTable {
    n: u64,
    log_r: Vec<f64>,
}

impl NmlComplexityTable {
    pub fn new(n: u64, k_max: usize) -> Self {
        let k_max = k_max.max(1);
        let mut log_r = Vec::with_capacity(k_max + 1);
        log_r.push(f64::NAN); // K = 0 is undefined
        log_r.push(0.0);
        if k_max >= 2 {
            log_r.push(log_complexity_two(n));
        }
        let ln_n = if n == 0 { f64::NEG_INFINITY } else { (n as f64).ln() };
        for k in 3..=k_max {
            // R(K) = R(K−1) + n/(K−2) · R(K−2)
            let carried = ln_n - ((k - 2) as f64).ln() + log_r[k - 2];
            log_r.push(log_add_exp(log_r[k - 1], carried));
        }
        Self { n, log_r }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k_max(&self) -> usize {
        self.log_r.len() - 1
    }

    /// `ln R(n, k)`; panics outside `1..=k_max`.
    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        assert!(k >= 1 && k < self.log_r.len(), "K = {k} outside NML table");
        self.log_r[k]
    }
}

/// `ln R(n, K)`.
pub fn nml_parametric_complexity(n: u64, k: usize) -> f64 {
    assert!(k >= 1, "K must be positive");
    NmlComplexityTable::new(n, k).get(k)
}
