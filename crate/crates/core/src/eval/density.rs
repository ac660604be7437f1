use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::grid::{Dataset, GridSpec};
use crate::model::HistogramModel;

/// A univariate probability density that can be integrated piecewise.
pub trait Density: Sync {
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    /// Smallest closed interval outside which the density vanishes; may be infinite.
    fn support(&self) -> (f64, f64);
    /// Points where the density is not smooth, or around which its mass
    /// concentrates. Quadrature segments are cut there.
    fn breakpoints(&self) -> Vec<f64>;

    /// Mass on `[a, b]`.
    fn mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            0.0
        } else {
            (self.cdf(b) - self.cdf(a)).max(0.0)
        }
    }
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Gaussian {
    mean: f64,
    sd: f64,
}

impl Gaussian {
    fn pdf(&self, x: f64) -> f64 {
        std_normal_pdf((x - self.mean) / self.sd) / self.sd
    }

    fn cdf(&self, x: f64) -> f64 {
        std_normal_cdf((x - self.mean) / self.sd)
    }
}

/// Triangular density on `[0, 1]` with mode `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Triangle {
    mode: f64,
}

impl Triangle {
    fn pdf(&self, x: f64) -> f64 {
        let c = self.mode;
        if !(0.0..=1.0).contains(&x) {
            0.0
        } else if x < c {
            2.0 * x / c
        } else if c < 1.0 {
            2.0 * (1.0 - x) / (1.0 - c)
        } else {
            2.0 * x
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        let c = self.mode;
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else if x < c {
            x * x / c
        } else {
            1.0 - (1.0 - x) * (1.0 - x) / (1.0 - c)
        }
    }

    fn quantile(&self, u: f64) -> f64 {
        let c = self.mode;
        if u < c {
            (u * c).sqrt()
        } else {
            1.0 - ((1.0 - u) * (1.0 - c)).sqrt()
        }
    }
}

const TRIANGLE_MIXTURE: [(f64, f64); 4] = [(0.1, 0.158), (0.3, 0.258), (0.4, 0.5), (0.2, 0.858)];

const CLAW: [(f64, f64, f64); 6] = [
    (0.5, 0.0, 1.0),
    (0.1, -1.0, 0.1),
    (0.1, -0.5, 0.1),
    (0.1, 0.0, 0.1),
    (0.1, 0.5, 0.1),
    (0.1, 1.0, 0.1),
];

/// The benchmark densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceDensity {
    /// N(0, 1).
    Normal,
    /// N(0, 1) / N(0, 1), i.e. the standard Cauchy law.
    Cauchy,
    /// U([0, 1]).
    Uniform,
    /// Triangular on `[0, 1]` with the given mode.
    Triangle(f64),
    /// 0.1 T(0.158) + 0.3 T(0.258) + 0.4 T(0.5) + 0.2 T(0.858).
    TriangleMixture,
    /// 0.5 N(0, 1) + Σ_{j=0..4} 0.1 N(j/2 − 1, 0.1).
    Claw,
}

impl ReferenceDensity {
    /// The six benchmark densities, the triangle with mode 0.158.
    pub const ALL: [ReferenceDensity; 6] = [
        ReferenceDensity::Normal,
        ReferenceDensity::Cauchy,
        ReferenceDensity::Uniform,
        ReferenceDensity::Triangle(0.158),
        ReferenceDensity::TriangleMixture,
        ReferenceDensity::Claw,
    ];

    /// `n` independent draws; identical for identical seeds on every platform.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Dataset> {
        if n == 0 {
            return Err(Error::invalid("sample size must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..n).map(|_| self.draw(&mut rng)).collect();
        Dataset::new(values)
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            ReferenceDensity::Normal => StandardNormal.sample(rng),
            ReferenceDensity::Cauchy => loop {
                let num: f64 = StandardNormal.sample(rng);
                let den: f64 = StandardNormal.sample(rng);
                if den != 0.0 {
                    break num / den;
                }
            },
            ReferenceDensity::Uniform => rng.random::<f64>(),
            ReferenceDensity::Triangle(c) => Triangle { mode: c }.quantile(rng.random::<f64>()),
            ReferenceDensity::TriangleMixture => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut mode = TRIANGLE_MIXTURE[TRIANGLE_MIXTURE.len() - 1].1;
                for (w, c) in TRIANGLE_MIXTURE {
                    acc += w;
                    if u < acc {
                        mode = c;
                        break;
                    }
                }
                Triangle { mode }.quantile(rng.random::<f64>())
            }
            ReferenceDensity::Claw => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut comp = CLAW[CLAW.len() - 1];
                for c in CLAW {
                    acc += c.0;
                    if u < acc {
                        comp = c;
                        break;
                    }
                }
                let z: f64 = StandardNormal.sample(rng);
                comp.1 + comp.2 * z
            }
        }
    }
}

impl Density for ReferenceDensity {
    fn pdf(&self, x: f64) -> f64 {
        match *self {
            ReferenceDensity::Normal => std_normal_pdf(x),
            ReferenceDensity::Cauchy => 1.0 / (PI * (1.0 + x * x)),
            ReferenceDensity::Uniform => {
                if (0.0..=1.0).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            ReferenceDensity::Triangle(c) => Triangle { mode: c }.pdf(x),
            ReferenceDensity::TriangleMixture => TRIANGLE_MIXTURE
                .iter()
                .map(|&(w, c)| w * Triangle { mode: c }.pdf(x))
                .sum(),
            ReferenceDensity::Claw => CLAW
                .iter()
                .map(|&(w, mean, sd)| w * Gaussian { mean, sd }.pdf(x))
                .sum(),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match *self {
            ReferenceDensity::Normal => std_normal_cdf(x),
            ReferenceDensity::Cauchy => 0.5 + x.atan() / PI,
            ReferenceDensity::Uniform => x.clamp(0.0, 1.0),
            ReferenceDensity::Triangle(c) => Triangle { mode: c }.cdf(x),
            ReferenceDensity::TriangleMixture => TRIANGLE_MIXTURE
                .iter()
                .map(|&(w, c)| w * Triangle { mode: c }.cdf(x))
                .sum(),
            ReferenceDensity::Claw => CLAW
                .iter()
                .map(|&(w, mean, sd)| w * Gaussian { mean, sd }.cdf(x))
                .sum(),
        }
    }

    fn support(&self) -> (f64, f64) {
        match self {
            ReferenceDensity::Normal | ReferenceDensity::Cauchy | ReferenceDensity::Claw => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            _ => (0.0, 1.0),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            ReferenceDensity::Normal => (-12..=12).map(|i| i as f64 * 0.75).collect(),
            ReferenceDensity::Cauchy => {
                let mut v = vec![0.0];
                for i in -3..=20 {
                    let x = 2f64.powi(i);
                    v.push(x);
                    v.push(-x);
                }
                v
            }
            ReferenceDensity::Uniform => vec![0.0, 1.0],
            ReferenceDensity::Triangle(c) => vec![0.0, c, 1.0],
            ReferenceDensity::TriangleMixture => {
                let mut v = vec![0.0, 1.0];
                v.extend(TRIANGLE_MIXTURE.iter().map(|&(_, c)| c));
                v
            }
            ReferenceDensity::Claw => {
                let mut v: Vec<f64> = (-12..=12).map(|i| i as f64 * 0.75).collect();
                v.extend((-30..=30).map(|i| i as f64 * 0.05));
                v
            }
        }
    }
}

impl fmt::Display for ReferenceDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferenceDensity::Normal => f.write_str("normal"),
            ReferenceDensity::Cauchy => f.write_str("cauchy"),
            ReferenceDensity::Uniform => f.write_str("uniform"),
            ReferenceDensity::Triangle(c) if *c == 0.158 => f.write_str("triangle"),
            ReferenceDensity::Triangle(c) => write!(f, "triangle({c})"),
            ReferenceDensity::TriangleMixture => f.write_str("triangle-mixture"),
            ReferenceDensity::Claw => f.write_str("claw"),
        }
    }
}

impl FromStr for ReferenceDensity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let d = match s.as_str() {
            "normal" | "gaussian" => ReferenceDensity::Normal,
            "cauchy" => ReferenceDensity::Cauchy,
            "uniform" => ReferenceDensity::Uniform,
            "triangle" => ReferenceDensity::Triangle(0.158),
            "triangle-mixture" | "triangle_mixture" => ReferenceDensity::TriangleMixture,
            "claw" | "claw-gaussian-mixture" => ReferenceDensity::Claw,
            other => {
                let mode = other
                    .strip_prefix("triangle(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|m| m.trim().parse::<f64>().ok())
                    .filter(|m| *m > 0.0 && *m < 1.0);
                match mode {
                    Some(c) => ReferenceDensity::Triangle(c),
                    None => return Err(Error::UnknownDensity(other.to_string())),
                }
            }
        };
        Ok(d)
    }
}

/// Piecewise-constant density given by interval edges and per-interval densities.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramDensity {
    edges: Vec<f64>,
    densities: Vec<f64>,
    cumulative: Vec<f64>,
}

impl HistogramDensity {
    pub fn new(edges: Vec<f64>, densities: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || densities.len() + 1 != edges.len() {
            return Err(Error::invalid("a histogram needs K + 1 edges for K densities"));
        }
        if edges.windows(2).any(|w| w[0].partial_cmp(&w[1]).is_none_or(|o| o.is_gt())) || edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::invalid("histogram edges must be finite and non-decreasing"));
        }
        if densities.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::invalid("histogram densities must be finite and non-negative"));
        }
        let mut cumulative = Vec::with_capacity(edges.len());
        cumulative.push(0.0);
        let mut acc = 0.0;
        for (k, d) in densities.iter().enumerate() {
            acc += d * (edges[k + 1] - edges[k]);
            cumulative.push(acc);
        }
        Ok(Self {
            edges,
            densities,
            cumulative,
        })
    }

    pub fn from_model(model: &HistogramModel, grid: &GridSpec) -> Self {
        let edges: Vec<f64> = model.cuts().iter().map(|&c| grid.endpoint(c)).collect();
        let densities = (0..model.k()).map(|k| model.interval_density(grid, k)).collect();
        Self::new(edges, densities).expect("a fitted model is a valid histogram")
    }

    /// `k` equal-width intervals on `[a, b]` carrying `p`'s mass on each,
    /// renormalised.
    pub fn equal_width_proxy(p: &dyn Density, a: f64, b: f64, k: usize) -> Result<Self> {
        if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) || k == 0 {
            return Err(Error::invalid("proxy needs a < b and k ≥ 1"));
        }
        let edges: Vec<f64> = (0..=k).map(|i| a + (b - a) * i as f64 / k as f64).collect();
        let masses: Vec<f64> = edges.windows(2).map(|w| p.mass(w[0], w[1])).collect();
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(Error::invalid("the density has no mass on the proxy range"));
        }
        let densities = masses
            .iter()
            .zip(edges.windows(2))
            .map(|(m, w)| m / total / (w[1] - w[0]))
            .collect();
        Self::new(edges, densities)
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    pub fn k(&self) -> usize {
        self.densities.len()
    }

    /// Index of the interval `]e_{k}, e_{k+1}]` holding `x` (the first one is closed).
    fn locate(&self, x: f64) -> Option<usize> {
        let (a, b) = (self.edges[0], self.edges[self.edges.len() - 1]);
        if x < a || x > b {
            return None;
        }
        let k = self.edges.partition_point(|&e| e < x);
        Some(k.saturating_sub(1).min(self.densities.len() - 1))
    }
}

impl Density for HistogramDensity {
    fn pdf(&self, x: f64) -> f64 {
        self.locate(x).map_or(0.0, |k| self.densities[k])
    }

    fn cdf(&self, x: f64) -> f64 {
        match self.locate(x) {
            None if x < self.edges[0] => 0.0,
            None => self.cumulative[self.cumulative.len() - 1],
            Some(k) => self.cumulative[k] + self.densities[k] * (x - self.edges[k]),
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.edges[0], self.edges[self.edges.len() - 1])
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.edges.clone()
    }
}
