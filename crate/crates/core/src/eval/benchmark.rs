//! Multi-seed benchmark over the reference densities.
//!
//! Config format, one `key = value` per line, `#` starts a comment:
//!
//! ```text
//! distributions = normal, uniform, claw
//! sizes = 100, 1000, 10000
//! seeds = 0..10
//! methods = genum, enum-greedy
//! epsilon = 0.01
//! output = records.csv
//! ```
//!
//! Lists are comma separated; `seeds` also accepts half-open ranges `a..b`.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use super::density::{HistogramDensity, ReferenceDensity};
use super::hellinger::hellinger;
use crate::criteria::Criterion;
use crate::error::{Error, Result};
use crate::search::{fit, FitSpec, Resolution, Solver};

/// Environment variable capping the number of benchmark worker threads.
pub const THREADS_ENV: &str = "HIST_THREADS";

/// Histogram method and solver, as named in benchmark configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchMethod {
    EnumGreedy,
    EnumDp,
    NmlGreedy,
    NmlDp,
    GEnum,
}

impl BenchMethod {
    pub fn fit_spec(self, epsilon: f64) -> FitSpec {
        let eps = Resolution::Epsilon(epsilon);
        match self {
            BenchMethod::EnumGreedy => FitSpec::fixed(Criterion::Enum, eps, Solver::Greedy),
            BenchMethod::EnumDp => FitSpec::fixed(Criterion::Enum, eps, Solver::Dp),
            BenchMethod::NmlGreedy => FitSpec::fixed(Criterion::Nml, eps, Solver::Greedy),
            BenchMethod::NmlDp => FitSpec::fixed(Criterion::Nml, eps, Solver::Dp),
            BenchMethod::GEnum => FitSpec::genum(),
        }
    }
}

impl fmt::Display for BenchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchMethod::EnumGreedy => "enum-greedy",
            BenchMethod::EnumDp => "enum-dp",
            BenchMethod::NmlGreedy => "nml-greedy",
            BenchMethod::NmlDp => "nml-dp",
            BenchMethod::GEnum => "genum",
        })
    }
}

impl FromStr for BenchMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "enum-greedy" | "enum" => Ok(BenchMethod::EnumGreedy),
            "enum-dp" => Ok(BenchMethod::EnumDp),
            "nml-greedy" | "nml" => Ok(BenchMethod::NmlGreedy),
            "nml-dp" => Ok(BenchMethod::NmlDp),
            "genum" | "g-enum" => Ok(BenchMethod::GEnum),
            other => Err(Error::invalid(format!("unknown benchmark method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub distributions: Vec<ReferenceDensity>,
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub methods: Vec<BenchMethod>,
    /// Accuracy for the fixed-grid methods.
    pub epsilon: f64,
    pub output: Option<PathBuf>,
}

impl Default for BenchmarkConfig {
    /// Six densities, `n = 10^4`, seeds `0..10`, G-Enum, `ε = 0.01`.
    fn default() -> Self {
        Self {
            distributions: ReferenceDensity::ALL.to_vec(),
            sizes: vec![10_000],
            seeds: (0..10).collect(),
            methods: vec![BenchMethod::GEnum],
            epsilon: 0.01,
            output: None,
        }
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_size(s: &str) -> Option<usize> {
    if let Ok(n) = s.parse::<usize>() {
        return Some(n);
    }
    // scientific notation such as 1e4
    let x = s.parse::<f64>().ok()?;
    (x >= 1.0 && x.fract() == 0.0 && x <= usize::MAX as f64).then_some(x as usize)
}

impl BenchmarkConfig {
    /// Parses a config; keys not given keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| Error::Config { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got {content:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "distributions" => {
                    cfg.distributions = split_list(value)
                        .map(|s| s.parse().map_err(|e: Error| err(e.to_string())))
                        .collect::<Result<_>>()?;
                    if cfg.distributions.is_empty() {
                        return Err(err("no distributions".into()));
                    }
                }
                "sizes" => {
                    cfg.sizes = split_list(value)
                        .map(|s| parse_size(s).ok_or_else(|| err(format!("bad size {s:?}"))))
                        .collect::<Result<_>>()?;
                    if cfg.sizes.is_empty() {
                        return Err(err("no sizes".into()));
                    }
                }
                "seeds" => {
                    let mut seeds = Vec::new();
                    for item in split_list(value) {
                        if let Some((a, b)) = item.split_once("..") {
                            let a: u64 = a.trim().parse().map_err(|_| err(format!("bad seed range {item:?}")))?;
                            let b: u64 = b.trim().parse().map_err(|_| err(format!("bad seed range {item:?}")))?;
                            seeds.extend(a..b);
                        } else {
                            seeds.push(item.parse().map_err(|_| err(format!("bad seed {item:?}")))?);
                        }
                    }
                    if seeds.is_empty() {
                        return Err(err("no seeds".into()));
                    }
                    cfg.seeds = seeds;
                }
                "methods" => {
                    cfg.methods = split_list(value)
                        .map(|s| s.parse().map_err(|e: Error| err(e.to_string())))
                        .collect::<Result<_>>()?;
                    if cfg.methods.is_empty() {
                        return Err(err("empty methods list".into()));
                    }
                }
                "epsilon" => {
                    cfg.epsilon = value
                        .parse::<f64>()
                        .ok()
                        .filter(|e| *e > 0.0 && e.is_finite())
                        .ok_or_else(|| err(format!("bad epsilon {value:?}")))?;
                }
                "output" => cfg.output = (!value.is_empty()).then(|| PathBuf::from(value)),
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn cells(&self) -> usize {
        self.distributions.len() * self.sizes.len() * self.seeds.len() * self.methods.len()
    }
}

/// One benchmark cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRecord {
    pub distribution: String,
    pub n: usize,
    pub seed: u64,
    pub method: String,
    /// 0 when the cell failed.
    pub k: usize,
    pub wall_seconds: f64,
    /// NaN when the cell failed.
    pub hellinger: f64,
    /// `None` on success, the error message otherwise.
    pub error: Option<String>,
}

impl BenchmarkRecord {
    pub const HEADER: [&'static str; 8] =
        ["distribution", "n", "seed", "method", "K", "wall_seconds", "hellinger", "status"];

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Samples, fits and scores a single cell. Failures are recorded, not raised.
pub fn run_cell(dist: ReferenceDensity, n: usize, seed: u64, method: BenchMethod, epsilon: f64) -> BenchmarkRecord {
    let mut record = BenchmarkRecord {
        distribution: dist.to_string(),
        n,
        seed,
        method: method.to_string(),
        k: 0,
        wall_seconds: f64::NAN,
        hellinger: f64::NAN,
        error: None,
    };
    let outcome = (|| -> Result<(usize, f64, f64)> {
        let data = dist.sample(n, seed)?;
        let start = Instant::now();
        let fitted = fit(&data, &method.fit_spec(epsilon))?;
        let secs = start.elapsed().as_secs_f64();
        let q = HistogramDensity::from_model(&fitted.model, &fitted.grid);
        Ok((fitted.model.k(), secs, hellinger(&dist, &q)?))
    })();
    match outcome {
        Ok((k, secs, hd)) => {
            record.k = k;
            record.wall_seconds = secs;
            record.hellinger = hd;
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Worker cap from `HIST_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
}

/// Runs every (distribution, size, seed, method) cell. Records come back in
/// config order whatever the scheduling.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<Vec<BenchmarkRecord>> {
    if cfg.methods.is_empty() || cfg.distributions.is_empty() || cfg.sizes.is_empty() || cfg.seeds.is_empty() {
        return Err(Error::invalid("benchmark needs at least one cell"));
    }
    let mut cells = Vec::with_capacity(cfg.cells());
    for &d in &cfg.distributions {
        for &n in &cfg.sizes {
            for &seed in &cfg.seeds {
                for &m in &cfg.methods {
                    cells.push((d, n, seed, m));
                }
            }
        }
    }
    let run = || -> Vec<BenchmarkRecord> {
        cells
            .par_iter()
            .map(|&(d, n, seed, m)| run_cell(d, n, seed, m, cfg.epsilon))
            .collect()
    };
    match threads_from_env() {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::invalid(format!("cannot start {t} threads: {e}")))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

pub fn write_records<W: Write>(records: &[BenchmarkRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BenchmarkRecord::HEADER)?;
    for r in records {
        w.write_record([
            r.distribution.clone(),
            r.n.to_string(),
            r.seed.to_string(),
            r.method.clone(),
            r.k.to_string(),
            format!("{:.6}", r.wall_seconds),
            format!("{:.6}", r.hellinger),
            r.error.clone().unwrap_or_else(|| "ok".into()),
        ])?;
    }
    w.flush().map_err(|source| Error::Io {
        path: PathBuf::from("<records>"),
        source,
    })?;
    Ok(())
}

/// Mean and sample standard deviation; `(NaN, NaN)` when empty.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Aggregate over seeds for one (distribution, n, method).
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub distribution: String,
    pub n: usize,
    pub method: String,
    pub runs: usize,
    pub failures: usize,
    pub hellinger: (f64, f64),
    pub k: (f64, f64),
    pub wall_seconds: (f64, f64),
}

/// Groups records by (distribution, n, method) in order of first appearance.
pub fn summarize(records: &[BenchmarkRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, usize, String)> = Vec::new();
    for r in records {
        let key = (r.distribution.clone(), r.n, r.method.clone());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(distribution, n, method)| {
            let group: Vec<&BenchmarkRecord> = records
                .iter()
                .filter(|r| r.distribution == distribution && r.n == n && r.method == method)
                .collect();
            let ok: Vec<&&BenchmarkRecord> = group.iter().filter(|r| r.is_ok()).collect();
            let col = |f: fn(&BenchmarkRecord) -> f64| mean_std(&ok.iter().map(|r| f(r)).collect::<Vec<_>>());
            SummaryRow {
                runs: group.len(),
                failures: group.len() - ok.len(),
                hellinger: col(|r| r.hellinger),
                k: col(|r| r.k as f64),
                wall_seconds: col(|r| r.wall_seconds),
                distribution,
                n,
                method,
            }
        })
        .collect()
}

/// Aligned text table, one row per summary group.
pub fn format_summary(rows: &[SummaryRow]) -> String {
    let header = ["distribution", "n", "method", "runs", "HD", "K", "time (s)"];
    let body: Vec<[String; 7]> = rows
        .iter()
        .map(|r| {
            [
                r.distribution.clone(),
                r.n.to_string(),
                r.method.clone(),
                if r.failures > 0 {
                    format!("{} ({} failed)", r.runs, r.failures)
                } else {
                    r.runs.to_string()
                },
                format!("{:.3} ± {:.3}", r.hellinger.0, r.hellinger.1),
                format!("{:.2} ± {:.2}", r.k.0, r.k.1),
                format!("{:.3} ± {:.3}", r.wall_seconds.0, r.wall_seconds.1),
            ]
        })
        .collect();
    let mut widths = header.map(|h| h.chars().count());
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut push_row = |cells: Vec<&str>| {
        let line: Vec<String> = cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    };
    push_row(header.to_vec());
    for row in &body {
        push_row(row.iter().map(String::as_str).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_keys() {
        let cfg = BenchmarkConfig::parse(
            "# comment\ndistributions = normal, claw\nsizes = 100, 1e3\nseeds = 0..3, 7\n\
             methods = genum, nml-dp\nepsilon = 0.05\noutput = out.csv # trailing\n",
        )
        .unwrap();
        assert_eq!(cfg.distributions, vec![ReferenceDensity::Normal, ReferenceDensity::Claw]);
        assert_eq!(cfg.sizes, vec![100, 1000]);
        assert_eq!(cfg.seeds, vec![0, 1, 2, 7]);
        assert_eq!(cfg.methods, vec![BenchMethod::GEnum, BenchMethod::NmlDp]);
        assert_eq!(cfg.epsilon, 0.05);
        assert_eq!(cfg.output, Some(PathBuf::from("out.csv")));
        assert_eq!(cfg.cells(), 2 * 2 * 4 * 2);
    }

    #[test]
    fn defaults_and_errors() {
        let cfg = BenchmarkConfig::parse("").unwrap();
        assert_eq!(cfg, BenchmarkConfig::default());
        assert_eq!(cfg.cells(), 60);
        for bad in ["methods =", "sizes = ten", "colour = red", "just words", "distributions = gamma"] {
            let err = BenchmarkConfig::parse(bad).unwrap_err();
            assert!(matches!(err, Error::Config { line: 1, .. }), "{bad}: {err}");
            assert_eq!(err.exit_code(), 2);
        }
    }

    #[test]
    fn single_cell_gives_one_record() {
        let cfg = BenchmarkConfig {
            distributions: vec![ReferenceDensity::Uniform],
            sizes: vec![200],
            seeds: vec![1],
            methods: vec![BenchMethod::EnumGreedy],
            ..Default::default()
        };
        let records = run_benchmark(&cfg).unwrap();
        assert_eq!(records.len(), 1);
        let r = &records[0];
        assert!(r.is_ok() && r.k >= 1 && (0.0..=1.0).contains(&r.hellinger));
        let rows = summarize(&records);
        assert_eq!(rows.len(), 1);
        assert!(format_summary(&rows).lines().count() == 2);
    }

    #[test]
    fn failures_are_recorded() {
        let r = run_cell(ReferenceDensity::Normal, 0, 0, BenchMethod::GEnum, 0.01);
        assert!(!r.is_ok() && r.k == 0);
    }

    #[test]
    fn csv_columns_are_fixed() {
        let records = vec![BenchmarkRecord {
            distribution: "normal".into(),
            n: 10,
            seed: 3,
            method: "genum".into(),
            k: 2,
            wall_seconds: 0.5,
            hellinger: 0.25,
            error: None,
        }];
        let mut buf = Vec::new();
        write_records(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "distribution,n,seed,method,K,wall_seconds,hellinger,status\n\
             normal,10,3,genum,2,0.500000,0.250000,ok\n"
        );
    }

    #[test]
    fn sample_statistics() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!((m, s), (2.0, 1.0));
        assert_eq!(mean_std(&[4.0]), (4.0, 0.0));
    }
}
