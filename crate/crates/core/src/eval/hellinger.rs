use std::f64::consts::PI;

use super::density::Density;
use crate::error::{Error, Result};

/// Gauss–Legendre nodes per quadrature segment.
pub const DEFAULT_NODES: usize = 64;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule; nodes are the roots of `P_n`, found by Newton iteration.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                // P_n(x) and P_n'(x) by the three-term recurrence
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HellingerOptions {
    pub nodes: usize,
    /// Mass left in unbounded common tails once the quadrature stops extending.
    pub tail_tolerance: f64,
    /// Doublings allowed when extending into an unbounded common tail.
    pub max_extensions: usize,
}

impl Default for HellingerOptions {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_NODES,
            tail_tolerance: 1e-15,
            max_extensions: 256,
        }
    }
}

/// Hellinger distance `(1/√2)·‖√p − √q‖₂`, not squared.
pub fn hellinger(p: &dyn Density, q: &dyn Density) -> Result<f64> {
    hellinger_with(p, q, &HellingerOptions::default())
}

pub fn hellinger_with(p: &dyn Density, q: &dyn Density, opts: &HellingerOptions) -> Result<f64> {
    let rule = GaussLegendre::new(opts.nodes);
    let (pl, ph) = p.support();
    let (ql, qh) = q.support();
    let lo = pl.max(ql);
    let hi = ph.min(qh);
    let p_total = p.cdf(f64::INFINITY);
    let q_total = q.cdf(f64::INFINITY);

    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Ok((0.5 * (p_total + q_total)).sqrt().min(1.0));
    }

    // where only one density lives, (√p − √q)² integrates to that density's mass
    let outside = |d: &dyn Density, total: f64| d.cdf(lo) + (total - d.cdf(hi)).max(0.0);
    let mut sum = outside(p, p_total) + outside(q, q_total);

    let mut cuts: Vec<f64> = p
        .breakpoints()
        .into_iter()
        .chain(q.breakpoints())
        .filter(|x| x.is_finite() && *x > lo && *x < hi)
        .collect();
    if lo.is_finite() {
        cuts.push(lo);
    }
    if hi.is_finite() {
        cuts.push(hi);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    if cuts.is_empty() {
        cuts.push(0.0f64.clamp(lo, hi));
    }

    let tail_mass = |a: f64, b: f64| p.mass(a, b) + q.mass(a, b);
    if lo == f64::NEG_INFINITY {
        let mut left = Vec::new();
        let first = cuts[0];
        let mut step = cuts.last().map_or(1.0, |l| (l - first).max(1.0));
        let mut x = first;
        while tail_mass(f64::NEG_INFINITY, x) > opts.tail_tolerance {
            if left.len() >= opts.max_extensions {
                return Err(Error::invalid("left tail integral did not converge"));
            }
            x -= step;
            step *= 2.0;
            left.push(x);
        }
        left.reverse();
        left.extend_from_slice(&cuts);
        cuts = left;
    }
    if hi == f64::INFINITY {
        let last = cuts[cuts.len() - 1];
        let mut step = (last - cuts[0]).max(1.0);
        let mut x = last;
        let mut added = 0;
        while tail_mass(x, f64::INFINITY) > opts.tail_tolerance {
            if added >= opts.max_extensions {
                return Err(Error::invalid("right tail integral did not converge"));
            }
            x += step;
            step *= 2.0;
            cuts.push(x);
            added += 1;
        }
    }

    let integrand = |x: f64| {
        let d = p.pdf(x).sqrt() - q.pdf(x).sqrt();
        d * d
    };
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            sum += rule.integrate(w[0], w[1], integrand);
        }
    }
    Ok((0.5 * sum).clamp(0.0, 1.0).sqrt())
}
