use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mdlhist::artifact::HistogramArtifact;
use mdlhist::eval::{self, BenchmarkConfig, Density, ReferenceDensity};
use mdlhist::grid::load_dataset;
use mdlhist::{fit, ColumnSelector, Error, FitMethod, FitSpec, Resolution, Result, Solver};

/// MDL-optimal irregular histograms.
///
/// Exit codes: 0 success, 2 usage error, 3 data error, 4 search budget exceeded.
#[derive(Debug, Parser)]
#[command(name = "mdlhist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a histogram to one column of a CSV/TSV file.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Column name or 0-based index.
        #[arg(long, default_value = "0")]
        column: String,
        /// enum, nml or genum.
        #[arg(long, default_value = "genum")]
        method: FitMethod,
        /// Grid accuracy in data units (enum and nml).
        #[arg(long, conflicts_with = "grid_bins")]
        epsilon: Option<f64>,
        /// Number of ε-bins (enum and nml).
        #[arg(long)]
        grid_bins: Option<u64>,
        /// greedy, or dp for the exact optimum on small problems.
        #[arg(long, default_value = "greedy")]
        solver: Solver,
        /// Artifact path; standard output when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write a two-column `x density` file.
        #[arg(long)]
        plot_out: Option<PathBuf>,
    },
    /// Run the multi-seed benchmark over the reference densities.
    Benchmark {
        /// key = value config; built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Records CSV path, overriding the config's `output`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Hellinger distance between a fitted histogram and a reference.
    Eval {
        /// Histogram artifact.
        #[arg(long)]
        input: PathBuf,
        /// Reference density name (normal, cauchy, uniform, triangle,
        /// triangle(c), triangle-mixture, claw) or a second artifact.
        #[arg(long)]
        reference: String,
    },
    /// Draw a sample from a reference density as a one-column CSV.
    Sample {
        #[arg(long)]
        distribution: ReferenceDensity,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV path; standard output when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    match path {
        Some(p) => fs::write(p, text).map_err(io_err(p)),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_fit(
    input: &Path,
    column: &str,
    method: FitMethod,
    epsilon: Option<f64>,
    grid_bins: Option<u64>,
    solver: Solver,
    output: Option<&Path>,
    plot_out: Option<&Path>,
) -> Result<()> {
    let spec = match method.criterion() {
        None => {
            if epsilon.is_some() || grid_bins.is_some() {
                eprintln!("note: genum scans its own grid; --epsilon/--grid-bins are ignored");
            }
            FitSpec { solver, ..FitSpec::genum() }
        }
        Some(criterion) => {
            let resolution = match (epsilon, grid_bins) {
                (Some(e), None) => Resolution::Epsilon(e),
                (None, Some(b)) => Resolution::Bins(b),
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "{method} needs exactly one of --epsilon or --grid-bins"
                    )))
                }
            };
            FitSpec::fixed(criterion, resolution, solver)
        }
    };
    let selector: ColumnSelector = column.parse().unwrap_or_else(|never| match never {});
    let report = load_dataset(input, &selector)?;
    if report.skipped > 0 {
        eprintln!("note: skipped {} rows without a finite value", report.skipped);
    }
    let result = fit(&report.dataset, &spec)?;
    let artifact = HistogramArtifact::from_fit(&result);
    write_out(output, &artifact.to_text())?;
    if let Some(p) = plot_out {
        write_out(Some(p), &artifact.plot_text())?;
    }
    eprintln!(
        "{method}: n = {}, K = {}, cost = {:.6} nats, {:.3} s",
        artifact.n,
        artifact.k(),
        artifact.cost.total,
        artifact.wall_seconds
    );
    Ok(())
}

fn cmd_benchmark(config: Option<&Path>, output: Option<PathBuf>) -> Result<()> {
    let mut cfg = match config {
        Some(p) => BenchmarkConfig::load(p)?,
        None => BenchmarkConfig::default(),
    };
    if output.is_some() {
        cfg.output = output;
    }
    eprintln!("running {} benchmark cells", cfg.cells());
    let records = eval::run_benchmark(&cfg)?;
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    let mut csv = Vec::new();
    eval::write_records(&records, &mut csv)?;
    let csv = String::from_utf8(csv).expect("records are UTF-8");
    let summary = eval::format_summary(&eval::summarize(&records));
    match &cfg.output {
        Some(p) => {
            write_out(Some(p), &csv)?;
            write_out(None, &summary)?;
        }
        None => {
            write_out(None, &csv)?;
            eprint!("{summary}");
        }
    }
    if failed > 0 {
        eprintln!("{failed} cells failed; see the status column");
    }
    Ok(())
}

fn cmd_eval(input: &Path, reference: &str) -> Result<()> {
    let q = HistogramArtifact::read(input)?.density()?;
    let reference_path = Path::new(reference);
    let h = if reference_path.is_file() {
        let p = HistogramArtifact::read(reference_path)?.density()?;
        eval::hellinger(&p, &q)?
    } else {
        let p: ReferenceDensity = reference.parse()?;
        eval::hellinger(&p as &dyn Density, &q)?
    };
    write_out(None, &format!("hellinger = {h:.9}\n"))
}

fn cmd_sample(distribution: ReferenceDensity, n: usize, seed: u64, output: Option<&Path>) -> Result<()> {
    let data = distribution.sample(n, seed)?;
    // a Dataset holds its values sorted
    let mut text = String::with_capacity(24 * n + 2);
    text.push_str("x\n");
    for v in data.values() {
        text.push_str(&format!("{v:?}\n"));
    }
    write_out(output, &text)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit {
            input,
            column,
            method,
            epsilon,
            grid_bins,
            solver,
            output,
            plot_out,
        } => cmd_fit(
            &input,
            &column,
            method,
            epsilon,
            grid_bins,
            solver,
            output.as_deref(),
            plot_out.as_deref(),
        ),
        Command::Benchmark { config, output } => cmd_benchmark(config.as_deref(), output),
        Command::Eval { input, reference } => cmd_eval(&input, &reference),
        Command::Sample {
            distribution,
            n,
            seed,
            output,
        } => cmd_sample(distribution, n, seed, output.as_deref()),
    }
}

fn main() -> ExitCode {
    // clap reports usage errors with exit code 2 itself
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
