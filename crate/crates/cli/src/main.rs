//! `degen-dt`: command-line front end for the perturbed-Delaunay experiments.

mod commands;
mod error;
mod manifest;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use degen_dt::largegrid::GridModel;

#[derive(Parser)]
#[command(
    name = "degen-dt",
    version,
    about = "Bias of perturbed Delaunay triangulations of grids and regular polygons"
)]
struct Cli {
    /// Cap on worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the output to this file instead of standard output. A sidecar
    /// `<out>.manifest.json` with timing information is written next to it.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// A subcommand with its parameters. The serialized form is what a manifest
/// records, so it doubles as the recipe for re-running.
#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", content = "parameters", rename_all = "kebab-case")]
enum Command {
    /// Emit a grid or polygon point set as CSV.
    Gen(GenArgs),
    /// Empirical distribution of perturbed grid triangulations.
    SimGrid(SimGridArgs),
    /// Empirical distribution of perturbed polygon triangulations.
    SimPoly(SimPolyArgs),
    /// Empirical frequency of every triangle of a perturbed polygon.
    TriFreq(TriFreqArgs),
    /// First-order probabilities of the 16 triangulations of the 3x3 grid.
    AnalyticGrid2(AnalyticGrid2Args),
    /// First-order probabilities of the triangulations of a small polygon.
    AnalyticPoly(AnalyticPolyArgs),
    /// Capped cycle-length walks on a large grid.
    Walk(WalkArgs),
    /// Connected components of the diagonal graph of large grids.
    Census(CensusArgs),
    /// Probability of the corner triangle of a regular polygon.
    Corner(CornerArgs),
    /// Convert a saved JSON report to CSV or JSON, optionally with an SVG chart.
    Report(ReportArgs),
    /// Re-run the command recorded in a report or manifest file.
    Rerun(RerunArgs),
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct SeedArg {
    /// Master seed; defaults to $DEGEN_DT_SEED, then 0.
    #[arg(long, env = "DEGEN_DT_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SetKind {
    Grid,
    Polygon,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: SetKind,
    /// Grid cells per side, or polygon vertex count.
    #[arg(long)]
    size: usize,
    /// Apply the default normal perturbation.
    #[arg(long)]
    perturb: bool,
    #[command(flatten)]
    #[serde(flatten)]
    seed: SeedArg,
    /// Iteration index selecting the random stream.
    #[arg(long, default_value_t = 0)]
    iteration: u64,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct SimGridArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1_000_000)]
    iters: u64,
    #[command(flatten)]
    #[serde(flatten)]
    seed: SeedArg,
    /// List only the most frequent codes.
    #[arg(long)]
    top_k: Option<usize>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct SimPolyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1_000_000)]
    iters: u64,
    #[command(flatten)]
    #[serde(flatten)]
    seed: SeedArg,
    #[arg(long)]
    top_k: Option<usize>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct TriFreqArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1_000_000)]
    iters: u64,
    #[command(flatten)]
    #[serde(flatten)]
    seed: SeedArg,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct AnalyticGrid2Args {
    /// Standard-error target for sampled orthant probabilities.
    #[arg(long, default_value_t = degen_dt::analytic::DEFAULT_TARGET_SE)]
    target_se: f64,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct AnalyticPolyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = degen_dt::analytic::DEFAULT_TARGET_SE)]
    target_se: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ModelArg {
    Dt,
    Uniform,
}

impl From<ModelArg> for GridModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Dt => GridModel::DtPerturbed,
            ModelArg::Uniform => GridModel::UniformDiagonals,
        }
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct WalkArgs {
    /// Model to run; both when omitted.
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long, default_value_t = 100_000)]
    walks: u64,
    #[arg(long, default_value_t = degen_dt::largegrid::DEFAULT_CAP)]
    cap: usize,
    #[command(flatten)]
    #[serde(flatten)]
    seed: SeedArg,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct CensusArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 100)]
    iters: u64,
    /// Model to run; both when omitted.
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[command(flatten)]
    #[serde(flatten)]
    seed: SeedArg,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct CornerArgs {
    /// Polygon sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Gauss–Hermite nodes; the check run uses twice as many.
    #[arg(long, default_value_t = degen_dt::corner::CornerIntegralSpec::DEFAULT_NODES)]
    nodes: usize,
    /// Largest accepted change under node doubling.
    #[arg(long, default_value_t = degen_dt::corner::CornerIntegralSpec::DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Monte Carlo iterations for the empirical column; 0 skips it.
    #[arg(long, default_value_t = 0)]
    mc_iters: u64,
    #[command(flatten)]
    #[serde(flatten)]
    seed: SeedArg,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct ReportArgs {
    /// JSON report written by another subcommand.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Also write an SVG bar chart here.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct RerunArgs {
    /// A JSON report, or a `.manifest.json` sidecar.
    #[arg(long)]
    input: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            return error::CliError::usage("--threads must be at least 1").report();
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            return error::CliError::io(format!("cannot start thread pool: {e}")).report();
        }
    }
    let started = Instant::now();
    let result = commands::run(&cli.command).and_then(|output| manifest::emit(&cli, output, started.elapsed()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
