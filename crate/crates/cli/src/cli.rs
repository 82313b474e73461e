use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "sfm", version, about = "Minimize grid-cut energies with decomposition solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one problem and write the minimizer mask and a trace CSV.
    Solve(SolveArgs),
    /// Run a sweep of algorithms, epsilon schedules and seeds.
    Bench(BenchArgs),
    /// Write a random grid specification.
    Gen(GenArgs),
}

/// Problem and solver options shared by `solve` and `bench`. Every option
/// can also be given in the `--config` file as `key = value`.
#[derive(Debug, Clone, Args, Default)]
pub struct ProblemArgs {
    /// `key = value` configuration file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Grid specification (text), PGM image or raw volume with a `.hdr` sidecar.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Dimensions of a synthetic grid when no input is given, e.g. `64x64`.
    #[arg(long)]
    pub dims: Option<String>,
    /// auto, grid2d, frames-chains or chains3.
    #[arg(long)]
    pub decomposition: Option<String>,
    /// const-delta, delta-over-t, delta-over-sqrt-t, fixed:<value> or infinite.
    #[arg(long)]
    pub epsilon_mode: Option<String>,
    /// Multiplier of the diameter in the epsilon schedules (default 1/sqrt(n)).
    #[arg(long)]
    pub proportionality: Option<f64>,
    #[arg(long)]
    pub max_outer_iters: Option<usize>,
    /// Absolute discrete-gap threshold (default 1e-6 (1 + |F(best)|)).
    #[arg(long)]
    pub gap_tolerance: Option<f64>,
    /// Pairwise weight scale for image inputs.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Intensity scale of the pairwise weights for image inputs.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Foreground mean intensity for image inputs.
    #[arg(long)]
    pub fg: Option<f64>,
    /// Background mean intensity for image inputs.
    #[arg(long)]
    pub bg: Option<f64>,
    /// Record wall-clock time in traces (makes them run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// bcd, acc or aar.
    #[arg(long)]
    pub algorithm: Option<String>,
    /// Seed of the synthetic grid.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Mask output: PGM for 2D grids, raw + `.hdr` for 3D.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Trace CSV output.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Comma-separated algorithms.
    #[arg(long)]
    pub algorithms: Option<String>,
    /// Comma-separated epsilon modes.
    #[arg(long)]
    pub epsilon_modes: Option<String>,
    /// Comma-separated seeds; each seed generates its own synthetic grid.
    #[arg(long)]
    pub seeds: Option<String>,
    /// Directory for traces.csv, summary.csv and per-cell traces.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// e.g. `8x8` or `4x3x2`.
    #[arg(long)]
    pub dims: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
    /// Edge weight range `lo,hi`.
    #[arg(long)]
    pub weight_range: Option<String>,
    /// Unary range `lo,hi`.
    #[arg(long)]
    pub unary_range: Option<String>,
}
