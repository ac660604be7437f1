//! Line-oriented text format for fitted histograms.
//!
//! ```text
//! mdlhist-histogram 1
//! method = genum
//! n = 10000
//! epsilon = 0.000244140625
//! origin = -4.0001220703125
//! bins = 32768
//! granularity = 32768
//! k = 2
//! cost_total = 1234.5
//! cost_index_terms = 10.1
//! cost_multinomial_terms = 900.2
//! cost_bin_index_terms = 324.2
//! wall_seconds = 0.0123
//! intervals = from_bin to_bin left right count density
//! 0 16384 -4.0001220703125 0 5000 0.125
//! 16384 32768 0 4.0001220703125 5000 0.125
//! end
//! ```
//!
//! Keys always appear in this order. Reals are written in their shortest
//! round-trip form, so reading an artifact back gives identical values.
//! `granularity` is `-` for the fixed-grid methods.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::criteria::CostBreakdown;
use crate::error::{Error, Result};
use crate::eval::HistogramDensity;
use crate::grid::GridSpec;
use crate::model::HistogramModel;
use crate::search::{FitMethod, FitResult};

pub const FORMAT_NAME: &str = "mdlhist-histogram";
pub const FORMAT_VERSION: u32 = 1;

const INTERVAL_COLUMNS: &str = "from_bin to_bin left right count density";

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalRecord {
    pub from_bin: u64,
    pub to_bin: u64,
    pub left: f64,
    pub right: f64,
    pub count: u64,
    pub density: f64,
}

/// A fitted histogram as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramArtifact {
    pub method: FitMethod,
    pub n: u64,
    pub grid: GridSpec,
    pub granularity: Option<u64>,
    pub cost: CostBreakdown,
    pub wall_seconds: f64,
    pub intervals: Vec<IntervalRecord>,
}

impl HistogramArtifact {
    pub fn from_fit(fit: &FitResult) -> Self {
        let m = &fit.model;
        let intervals = (0..m.k())
            .map(|k| IntervalRecord {
                from_bin: m.cuts()[k],
                to_bin: m.cuts()[k + 1],
                left: fit.grid.endpoint(m.cuts()[k]),
                right: fit.grid.endpoint(m.cuts()[k + 1]),
                count: m.counts()[k],
                density: m.interval_density(&fit.grid, k),
            })
            .collect();
        Self {
            method: fit.method,
            n: m.n(),
            grid: fit.grid,
            granularity: fit.granularity,
            cost: fit.cost,
            wall_seconds: fit.elapsed.as_secs_f64(),
            intervals,
        }
    }

    pub fn k(&self) -> usize {
        self.intervals.len()
    }

    pub fn model(&self) -> Result<HistogramModel> {
        let mut cuts = vec![0];
        cuts.extend(self.intervals.iter().map(|r| r.to_bin));
        HistogramModel::new(cuts, self.intervals.iter().map(|r| r.count).collect())
    }

    pub fn density(&self) -> Result<HistogramDensity> {
        let mut edges = vec![self.intervals[0].left];
        edges.extend(self.intervals.iter().map(|r| r.right));
        HistogramDensity::new(edges, self.intervals.iter().map(|r| r.density).collect())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let c = &self.cost;
        let granularity = self.granularity.map_or("-".to_string(), |g| g.to_string());
        // writing to a String cannot fail
        let _ = writeln!(s, "{FORMAT_NAME} {FORMAT_VERSION}");
        let _ = writeln!(s, "method = {}", self.method);
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "epsilon = {:?}", self.grid.epsilon);
        let _ = writeln!(s, "origin = {:?}", self.grid.origin);
        let _ = writeln!(s, "bins = {}", self.grid.bins);
        let _ = writeln!(s, "granularity = {granularity}");
        let _ = writeln!(s, "k = {}", self.k());
        let _ = writeln!(s, "cost_total = {:?}", c.total);
        let _ = writeln!(s, "cost_index_terms = {:?}", c.index_terms);
        let _ = writeln!(s, "cost_multinomial_terms = {:?}", c.multinomial_terms);
        let _ = writeln!(s, "cost_bin_index_terms = {:?}", c.bin_index_terms);
        let _ = writeln!(s, "wall_seconds = {:?}", self.wall_seconds);
        let _ = writeln!(s, "intervals = {INTERVAL_COLUMNS}");
        for r in &self.intervals {
            let _ = writeln!(
                s,
                "{} {} {:?} {:?} {} {:?}",
                r.from_bin, r.to_bin, r.left, r.right, r.count, r.density
            );
        }
        s.push_str("end\n");
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::Artifact {
                    line: 0,
                    message: format!("truncated before {what}"),
                })
        };

        let (line, head) = next("the header")?;
        let version = head
            .strip_prefix(FORMAT_NAME)
            .map(str::trim)
            .and_then(|v| v.parse::<u32>().ok())
            .ok_or_else(|| Error::Artifact {
                line,
                message: format!("not a {FORMAT_NAME} artifact"),
            })?;
        if version != FORMAT_VERSION {
            return Err(Error::Artifact {
                line,
                message: format!("unsupported version {version}"),
            });
        }

        let mut field = |key: &str| -> Result<(usize, String)> {
            let (line, l) = next(key)?;
            let value = l
                .split_once('=')
                .filter(|(k, _)| k.trim() == key)
                .map(|(_, v)| v.trim().to_string())
                .ok_or_else(|| Error::Artifact {
                    line,
                    message: format!("expected `{key} = …`"),
                })?;
            Ok((line, value))
        };
        fn num<T: std::str::FromStr>(key: &str, (line, v): (usize, String)) -> Result<T> {
            v.parse().map_err(|_| Error::Artifact {
                line,
                message: format!("bad {key} {v:?}"),
            })
        }

        let (mline, mvalue) = field("method")?;
        let method: FitMethod = mvalue.parse().map_err(|_| Error::Artifact {
            line: mline,
            message: format!("unknown method {mvalue:?}"),
        })?;
        let n: u64 = num("n", field("n")?)?;
        let epsilon: f64 = num("epsilon", field("epsilon")?)?;
        let origin: f64 = num("origin", field("origin")?)?;
        let bins: u64 = num("bins", field("bins")?)?;
        let (gline, gvalue) = field("granularity")?;
        let granularity = if gvalue == "-" {
            None
        } else {
            Some(num("granularity", (gline, gvalue))?)
        };
        let (kline, kvalue) = field("k")?;
        let k: usize = num("k", (kline, kvalue))?;
        let total: f64 = num("cost_total", field("cost_total")?)?;
        let index_terms: f64 = num("cost_index_terms", field("cost_index_terms")?)?;
        let multinomial_terms: f64 = num("cost_multinomial_terms", field("cost_multinomial_terms")?)?;
        let bin_index_terms: f64 = num("cost_bin_index_terms", field("cost_bin_index_terms")?)?;
        let wall_seconds: f64 = num("wall_seconds", field("wall_seconds")?)?;
        let (cline, columns) = field("intervals")?;
        if columns != INTERVAL_COLUMNS {
            return Err(Error::Artifact {
                line: cline,
                message: format!("unexpected interval columns {columns:?}"),
            });
        }

        let mut intervals = Vec::with_capacity(k);
        loop {
            let (line, l) = next("end")?;
            if l == "end" {
                break;
            }
            let parts: Vec<&str> = l.split_whitespace().collect();
            let bad = || Error::Artifact {
                line,
                message: format!("bad interval record {l:?}"),
            };
            if parts.len() != 6 {
                return Err(bad());
            }
            intervals.push(IntervalRecord {
                from_bin: parts[0].parse().map_err(|_| bad())?,
                to_bin: parts[1].parse().map_err(|_| bad())?,
                left: parts[2].parse().map_err(|_| bad())?,
                right: parts[3].parse().map_err(|_| bad())?,
                count: parts[4].parse().map_err(|_| bad())?,
                density: parts[5].parse().map_err(|_| bad())?,
            });
        }
        if intervals.len() != k || k == 0 {
            return Err(Error::Artifact {
                line: kline,
                message: format!("k = {k} but {} interval records", intervals.len()),
            });
        }
        let counted: u64 = intervals.iter().map(|r| r.count).sum();
        if counted != n {
            return Err(Error::Artifact {
                line: kline,
                message: format!("interval counts sum to {counted}, expected n = {n}"),
            });
        }
        let artifact = Self {
            method,
            n,
            grid: GridSpec { epsilon, bins, origin },
            granularity,
            cost: CostBreakdown {
                index_terms,
                multinomial_terms,
                bin_index_terms,
                total,
            },
            wall_seconds,
            intervals,
        };
        artifact.model().map_err(|e| Error::Artifact {
            line: kline,
            message: e.to_string(),
        })?;
        Ok(artifact)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Two-column `x density` text tracing the step function at interval edges.
    pub fn plot_text(&self) -> String {
        let mut s = String::from("# x density\n");
        for r in &self.intervals {
            let _ = writeln!(s, "{:?} {:?}", r.left, r.density);
            let _ = writeln!(s, "{:?} {:?}", r.right, r.density);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Dataset;
    use crate::search::{fit, FitSpec};

    fn sample_fit() -> FitResult {
        let values: Vec<f64> = (0..300).map(|i| ((i * 7919) % 1000) as f64 / 997.0 + (i % 3) as f64).collect();
        fit(&Dataset::new(values).unwrap(), &FitSpec::genum()).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let a = HistogramArtifact::from_fit(&sample_fit());
        let text = a.to_text();
        let b = HistogramArtifact::parse(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.to_text(), text);
    }

    #[test]
    fn densities_match_the_model() {
        let f = sample_fit();
        let a = HistogramArtifact::from_fit(&f);
        let mass: f64 = a.intervals.iter().map(|r| r.density * (r.right - r.left)).sum();
        assert!((mass - 1.0).abs() < 1e-9);
        for r in &a.intervals {
            let mid = 0.5 * (r.left + r.right);
            assert!((f.density_at(mid) - r.density).abs() <= 1e-9 * r.density.max(1.0));
        }
        assert_eq!(a.model().unwrap(), f.model);
    }

    #[test]
    fn rejects_corruption() {
        let text = HistogramArtifact::from_fit(&sample_fit()).to_text();
        assert!(HistogramArtifact::parse("").is_err());
        assert!(HistogramArtifact::parse(&text.replace("mdlhist-histogram 1", "mdlhist-histogram 9")).is_err());
        assert!(HistogramArtifact::parse(&text.replace("\nend\n", "\n")).is_err());
        assert!(HistogramArtifact::parse(&text.replacen("n = 300", "n = 301", 1)).is_err());
        let err = HistogramArtifact::parse(&text.replacen("method = genum", "method = magic", 1)).unwrap_err();
        assert!(matches!(err, Error::Artifact { line: 2, .. }));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn plot_traces_edges() {
        let a = HistogramArtifact::from_fit(&sample_fit());
        assert_eq!(a.plot_text().lines().count(), 1 + 2 * a.k());
    }
}
