//! `thinning` command line: generate datasets, thin paired samples,
//! balance sparse vector streams, measure discrepancies exactly, and run
//! seeded experiment sweeps.
//!
//! All randomness flows from explicit `--seed` flags through a keyed
//! derivation chain, so every output is reproducible. Errors print a
//! machine-readable JSON object on stderr and exit nonzero.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod experiment;
mod io;

use experiment::{records_to_csv, run_experiment, ExperimentConfig};
use thinning::balance::balance_stream;
use thinning::oracle::{
    dyadic_prefix_sup, finite_box_discrepancy_d1, lattice_prefix_sup, max_slice_count,
    prefix_sign_sup, star_discrepancy_uniform, two_sample_discrepancy,
};
use thinning::pipeline::{thin_two_samples, ThinningParams};
use thinning::seed::derive_str;

/// CLI-level error with a machine-readable kind.
#[derive(Debug, Serialize)]
pub struct CliError {
    pub kind: &'static str,
    pub error: String,
}

impl CliError {
    fn new(kind: &'static str, error: impl Into<String>) -> Self {
        CliError {
            kind,
            error: error.into(),
        }
    }

    pub fn io(msg: impl Into<String>) -> Self {
        CliError::new("io", msg)
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        CliError::new("parse", msg)
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::new("config", msg)
    }
}

impl From<thinning::Error> for CliError {
    fn from(e: thinning::Error) -> Self {
        CliError::new("core", e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "thinning",
    version,
    about = "Online thinning to reduce two-sample discrepancy"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an i.i.d. dataset as a point CSV.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
        /// Per-axis model JSON (array of CdfModel objects); default uniform.
        #[arg(long)]
        dist: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Write (or on input: expect) a header row.
        #[arg(long)]
        header: bool,
    },
    /// Thin two equal-size samples; writes kept_x.csv, kept_y.csv,
    /// decisions.csv and report.json into --out.
    Thin {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        t: f64,
        /// Dyadic resolution override (default ceil(log2 n)).
        #[arg(long)]
        l: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Per-axis model JSON; when given, inputs are transformed first.
        #[arg(long)]
        dist: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        header: bool,
    },
    /// Choose signs for a sparse-vector stream; writes signs.csv and
    /// stats.json into --out.
    Balance {
        /// Sparse vectors, one per line of space-separated id:value pairs.
        #[arg(long)]
        vectors: PathBuf,
        #[arg(long = "l1-bound")]
        l1_bound: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact discrepancy measurements; prints result JSON on stdout.
    Measure {
        /// Two point files: sup over anchored boxes of |#X - #Y|.
        #[arg(long = "two-sample", num_args = 2, value_names = ["X", "Y"])]
        two_sample: Option<Vec<PathBuf>>,
        /// Signed-stream CSV: max over prefixes and anchored boxes.
        #[arg(long = "prefix-sup")]
        prefix_sup: Option<PathBuf>,
        /// Signed-stream CSV: max over prefixes and dyadic boxes (needs --l).
        #[arg(long)]
        dyadic: Option<PathBuf>,
        /// Signed-stream CSV: max over prefixes and lattice boxes (needs --l).
        #[arg(long)]
        lattice: Option<PathBuf>,
        /// Point file: max points in any slice (needs --l).
        #[arg(long)]
        slices: Option<PathBuf>,
        /// Point file: exact star discrepancy vs uniform on the unit cube.
        #[arg(long)]
        star: Option<PathBuf>,
        /// Two point files, d=1: exact discrepancy over finite boxes [a,b].
        #[arg(long = "finite-box", num_args = 2, value_names = ["X", "Y"])]
        finite_box: Option<Vec<PathBuf>>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long)]
        header: bool,
    },
    /// Run a trial sweep from a config JSON; writes records.csv and
    /// summary.json into --out.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: alongside the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::to_string(&e).unwrap_or_else(|_| e.error.clone())
            );
            ExitCode::FAILURE
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("create {}: {e}", dir.display())))
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Gen {
            n,
            d,
            seed,
            out,
            dist,
            format,
            header,
        } => {
            let models = dist.as_deref().map(io::read_models).transpose()?;
            let points = experiment::gen_dataset(models.as_deref(), n, d, derive_str(seed, "gen"))?;
            match format {
                Format::Csv => io::write_points(&out, &points, header)?,
                Format::Json => io::write_points_json(&out, &points)?,
            }
            Ok(())
        }
        Command::Thin {
            x,
            y,
            t,
            l,
            seed,
            out,
            dist,
            format,
            header,
        } => {
            let xs = io::read_points(&x, header)?;
            let ys = io::read_points(&y, header)?;
            let params = ThinningParams {
                t,
                levels: l,
                seed,
                models: dist.as_deref().map(io::read_models).transpose()?,
            };
            for warning in params.warnings(xs.len()) {
                eprintln!("warning: {warning}");
            }
            let outcome = thin_two_samples(&xs, &ys, &params)?;
            ensure_dir(&out)?;
            match format {
                Format::Csv => {
                    io::write_points(&out.join("kept_x.csv"), &outcome.kept_x, header)?;
                    io::write_points(&out.join("kept_y.csv"), &outcome.kept_y, header)?;
                }
                Format::Json => {
                    io::write_points_json(&out.join("kept_x.json"), &outcome.kept_x)?;
                    io::write_points_json(&out.join("kept_y.json"), &outcome.kept_y)?;
                }
            }
            io::write_signed_stream(&out.join("kept_stream.csv"), &outcome.kept_stream)?;
            io::write_decisions_csv(
                &out.join("decisions.csv"),
                &outcome
                    .decisions
                    .iter()
                    .map(|d| d.kept())
                    .collect::<Vec<_>>(),
            )?;
            io::write_json(&out.join("report.json"), &outcome.report)?;
            Ok(())
        }
        Command::Balance {
            vectors,
            l1_bound,
            seed,
            out,
        } => {
            let vecs = io::read_sparse_vectors(&vectors)?;
            let (signs, stats) = balance_stream(&vecs, l1_bound, seed)?;
            ensure_dir(&out)?;
            io::write_signs_csv(&out.join("signs.csv"), &signs)?;
            io::write_json(&out.join("stats.json"), &stats)?;
            Ok(())
        }
        Command::Measure {
            two_sample,
            prefix_sup,
            dyadic,
            lattice,
            slices,
            star,
            finite_box,
            l,
            header,
        } => {
            let need_l =
                || l.ok_or_else(|| CliError::config("--l is required for this measurement"));
            let modes = usize::from(two_sample.is_some())
                + usize::from(prefix_sup.is_some())
                + usize::from(dyadic.is_some())
                + usize::from(lattice.is_some())
                + usize::from(slices.is_some())
                + usize::from(star.is_some())
                + usize::from(finite_box.is_some());
            if modes != 1 {
                return Err(CliError::config(
                    "measure needs exactly one of --two-sample, --prefix-sup, --dyadic, --lattice, --slices, --star, --finite-box",
                ));
            }
            let json = if let Some(files) = two_sample {
                let xs = io::read_points(&files[0], header)?;
                let ys = io::read_points(&files[1], header)?;
                serde_json::to_value(two_sample_discrepancy(&xs, &ys)?)
            } else if let Some(path) = prefix_sup {
                let stream = io::read_signed_stream(&path, header)?;
                serde_json::to_value(prefix_sign_sup(&stream)?)
            } else if let Some(path) = dyadic {
                let stream = io::read_signed_stream(&path, header)?;
                serde_json::to_value(serde_json::json!({
                    "value": dyadic_prefix_sup(&stream, need_l()?)?
                }))
            } else if let Some(path) = lattice {
                let stream = io::read_signed_stream(&path, header)?;
                serde_json::to_value(serde_json::json!({
                    "value": lattice_prefix_sup(&stream, need_l()?)?
                }))
            } else if let Some(path) = slices {
                let points = io::read_points(&path, header)?;
                serde_json::to_value(serde_json::json!({
                    "value": max_slice_count(&points, need_l()?)?
                }))
            } else if let Some(path) = star {
                let points = io::read_points(&path, header)?;
                serde_json::to_value(star_discrepancy_uniform(&points)?)
            } else if let Some(files) = finite_box {
                let xs = io::read_points(&files[0], header)?;
                let ys = io::read_points(&files[1], header)?;
                serde_json::to_value(finite_box_discrepancy_d1(&xs, &ys)?)
            } else {
                unreachable!("mode count checked above")
            };
            let json = json.map_err(|e| CliError::parse(format!("serialize result: {e}")))?;
            println!("{json}");
            Ok(())
        }
        Command::Experiment { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out_dir = out.unwrap_or_else(|| {
                config
                    .parent()
                    .map_or_else(|| PathBuf::from("."), Path::to_path_buf)
            });
            ensure_dir(&out_dir)?;
            let (records, summary) = run_experiment(&cfg)?;
            std::fs::write(out_dir.join("records.csv"), records_to_csv(&records)?)
                .map_err(|e| CliError::io(format!("write records.csv: {e}")))?;
            io::write_json(&out_dir.join("summary.json"), &summary)?;
            Ok(())
        }
    }
}
