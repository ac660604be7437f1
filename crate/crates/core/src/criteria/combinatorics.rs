//! Log-space combinatorics. Everything is in nats.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Normalising constant of the universal prior for integers.
pub const KAPPA0: f64 = 2.865;

/// `ln n!` is tabulated up to this argument.
const FACTORIAL_TABLE_LEN: usize = 1 << 20;

/// Below this `min(b, a − b)` binomials are summed term by term.
const DIRECT_BINOMIAL_LIMIT: u64 = 30;

/// Universal code length for positive integers, in nats:
/// `ln 2 · (log2 κ0 + Σ_j max(log2^(j) k, 0))`.
pub fn log_star(k: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("log* is defined for k >= 1"));
    }
    Ok(log_star_unchecked(k))
}

#[inline]
pub(crate) fn log_star_unchecked(k: u64) -> f64 {
    let mut bits = KAPPA0.log2();
    let mut x = (k as f64).log2();
    while x > 0.0 {
        bits += x;
        x = x.log2();
    }
    bits * LN_2
}

fn factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Neumaier-compensated running sum of ln k keeps every entry within
        // an ulp or two of the exact value.
        let mut table = Vec::with_capacity(FACTORIAL_TABLE_LEN);
        table.push(0.0);
        let (mut sum, mut carry) = (0.0f64, 0.0f64);
        for k in 1..FACTORIAL_TABLE_LEN {
            let term = (k as f64).ln();
            let t = sum + term;
            if sum.abs() >= term.abs() {
                carry += (sum - t) + term;
            } else {
                carry += (term - t) + sum;
            }
            sum = t;
            table.push(sum + carry);
        }
        table
    })
}

/// `ln m! − [(m + ½) ln m − m + ½ ln 2π]`, for `m > DIRECT_BINOMIAL_LIMIT`.
#[inline]
fn stirling_error(m: f64) -> f64 {
    let inv = 1.0 / m;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// `ln k!`.
#[inline]
pub fn log_factorial(k: u64) -> f64 {
    let table = factorial_table();
    if (k as usize) < table.len() {
        table[k as usize]
    } else {
        let m = k as f64;
        (m + 0.5) * m.ln() - m + 0.5 * (2.0 * PI).ln() + stirling_error(m)
    }
}

/// `ln C(a, b)`; rejects `b > a`.
pub fn log_binomial(a: u64, b: u64) -> Result<f64> {
    if b > a {
        return Err(Error::invalid(format!("binomial C({a}, {b}) needs b <= a")));
    }
    Ok(log_binomial_unchecked(a, b))
}

pub(crate) fn log_binomial_unchecked(a: u64, b: u64) -> f64 {
    let k = b.min(a - b);
    if k == 0 {
        return 0.0;
    }
    let rest = a - k;
    if k <= DIRECT_BINOMIAL_LIMIT {
        // C(a, k) = Π_{i=1..k} (rest + i)/i; every factor is ≥ 1
        return (1..=k).map(|i| (rest as f64 / i as f64).ln_1p()).sum();
    }
    // Both k and a − k exceed the limit here. Writing the factorials through
    // Stirling's series leaves only non-negative, well-conditioned terms.
    let (a, k, rest) = (a as f64, k as f64, rest as f64);
    stirling_error(a) - stirling_error(k) - stirling_error(rest)
        + 0.5 * (a / (2.0 * PI * k * rest)).ln()
        + k * (a / k).ln()
        - rest * (-k / a).ln_1p()
}

/// `ln (n! / Π h_k!)`; rejects counts that do not sum to `n`.
pub fn log_multinomial(n: u64, counts: &[u64]) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total != n {
        return Err(Error::invalid(format!("counts sum to {total}, expected {n}")));
    }
    Ok(log_factorial(n) - counts.iter().map(|&h| log_factorial(h)).sum::<f64>())
}

/// `x ln x` with `0 ln 0 = 0`.
#[inline]
pub fn x_ln_x(x: u64) -> f64 {
    if x == 0 {
        0.0
    } else {
        let x = x as f64;
        x * x.ln()
    }
}

/// `h ln w` with `0 ln 0 = 0` and `+∞` for `h > 0, w = 0`.
#[inline]
pub fn count_ln_width(h: u64, w: u64) -> f64 {
    match (h, w) {
        (0, _) => 0.0,
        (_, 0) => f64::INFINITY,
        _ => h as f64 * (w as f64).ln(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn big_ln(x: &BigUint) -> f64 {
        let bits = x.bits();
        if bits <= 60 {
            return (x.iter_u64_digits().next().unwrap_or(0) as f64).ln();
        }
        let shift = bits - 60;
        let top: BigUint = x >> shift;
        (top.iter_u64_digits().next().unwrap() as f64).ln() + shift as f64 * LN_2
    }

    fn big_binomial(a: u64, b: u64) -> BigUint {
        let mut acc = BigUint::from(1u32);
        for i in 1..=b {
            acc = acc * BigUint::from(a - b + i) / BigUint::from(i);
        }
        acc
    }

    #[test]
    fn log_star_values() {
        assert!((log_star(1).unwrap() - 2.865f64.ln()).abs() < 1e-15);
        assert!((log_star(1).unwrap() - 1.0526).abs() < 1e-4);
        assert!((log_star(2).unwrap() - (2.865f64.ln() + LN_2)).abs() < 1e-15);
        assert!((log_star(2).unwrap() - 1.7458).abs() < 1e-4);
        // log2 16 = 4, log2 4 = 2, log2 2 = 1
        let expected = (KAPPA0.log2() + 4.0 + 2.0 + 1.0) * LN_2;
        assert!((log_star(16).unwrap() - expected).abs() < 1e-12);
        assert!(log_star(0).is_err());
    }

    #[test]
    fn log_star_is_monotone() {
        let mut prev = log_star_unchecked(1);
        for k in 2..=1_000_000u64 {
            let cur = log_star_unchecked(k);
            assert!(cur >= prev, "log* decreases at {k}");
            prev = cur;
        }
    }

    #[test]
    fn binomial_small_cases() {
        assert!((log_binomial(5, 2).unwrap() - 10f64.ln()).abs() < 1e-15);
        assert_eq!(log_binomial(9, 0).unwrap(), 0.0);
        assert_eq!(log_binomial(9, 9).unwrap(), 0.0);
        assert_eq!(log_binomial(0, 0).unwrap(), 0.0);
        assert!(log_binomial(3, 4).is_err());
    }

    #[test]
    fn binomial_matches_big_integer_oracle() {
        let cases = [
            ((1u64 << 30) + 15, 15u64),
            (1 << 30, 31),
            (1 << 30, 1000),
            (1_000_000_000, 12_345),
            (100, 50),
            (64, 31),
            (20_000, 9_999),
            (5_000, 40),
        ];
        for (a, b) in cases {
            let exact = big_ln(&big_binomial(a, b));
            let got = log_binomial(a, b).unwrap();
            let rel = ((got - exact) / exact).abs();
            assert!(rel < 1e-12, "C({a},{b}): got {got}, exact {exact}, rel {rel}");
        }
    }

    #[test]
    fn binomial_matches_log_gamma_at_scale() {
        use statrs::function::gamma::ln_gamma;
        for (a, b) in [(1u64 << 30, 1u64 << 29), (2_000_000, 999_999), (1 << 30, 1 << 20)] {
            let (af, bf) = (a as f64, b as f64);
            let exact = ln_gamma(af + 1.0) - ln_gamma(bf + 1.0) - ln_gamma(af - bf + 1.0);
            let got = log_binomial(a, b).unwrap();
            let rel = ((got - exact) / exact).abs();
            assert!(rel < 1e-11, "C({a},{b}): got {got}, log-gamma {exact}, rel {rel}");
        }
    }

    #[test]
    fn factorial_table_and_series_agree() {
        let mut exact = BigUint::from(1u32);
        for k in 1..=200u64 {
            exact *= BigUint::from(k);
            let want = big_ln(&exact);
            let err = (log_factorial(k) - want).abs();
            assert!(err <= 1e-14 * want.max(1.0), "ln {k}!");
        }
        // crossing the end of the table
        let edge = FACTORIAL_TABLE_LEN as u64;
        let below = log_factorial(edge - 1);
        let above = log_factorial(edge);
        assert!((above - below - (edge as f64).ln()).abs() < 1e-7);
    }

    #[test]
    fn multinomial_cases() {
        assert_eq!(log_multinomial(4, &[4]).unwrap(), 0.0);
        assert!((log_multinomial(4, &[2, 2]).unwrap() - 6f64.ln()).abs() < 1e-14);
        let ten_fact: f64 = (1..=10).map(|k| (k as f64).ln()).sum();
        assert!((log_multinomial(10, &[1; 10]).unwrap() - ten_fact).abs() < 1e-12);
        assert!((log_multinomial(3, &[0, 3, 0]).unwrap()).abs() < 1e-15);
        assert!(log_multinomial(5, &[2, 2]).is_err());
    }

    #[test]
    fn zero_log_zero_conventions() {
        assert_eq!(x_ln_x(0), 0.0);
        assert_eq!(count_ln_width(0, 0), 0.0);
        assert_eq!(count_ln_width(0, 9), 0.0);
        assert!(count_ln_width(1, 0).is_infinite());
        assert!((count_ln_width(3, 4) - 3.0 * 4f64.ln()).abs() < 1e-15);
    }
}
