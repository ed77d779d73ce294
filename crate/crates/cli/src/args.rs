use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsplit_core::router::DEFAULT_LOOKAHEAD_WINDOW;
use qsplit_core::RouterMode;

#[derive(Debug, Parser)]
#[command(name = "qsplit", version, about = "Density-controlled circuit generation and parallel qubit routing")]
pub struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random circuit with exact width, depth and gate density.
    Gen(GenArgs),
    /// Route a circuit for a processor, splitting it into sub-circuits.
    Compile(CompileArgs),
    /// Check a compiled circuit against its source by simulation.
    Verify(VerifyArgs),
    /// Print width, depth, gate counts and density as JSON.
    Stats(StatsArgs),
    /// Run a generate-and-compile grid and write a CSV table.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouterKind {
    Basic,
    Lookahead,
}

#[derive(Debug, Clone, Args)]
pub struct RouterArgs {
    #[arg(long, value_enum, default_value_t = RouterKind::Lookahead)]
    pub router: RouterKind,
    /// Two-qubit gates scored ahead of the front layer (lookahead only).
    #[arg(long, default_value_t = DEFAULT_LOOKAHEAD_WINDOW)]
    pub window: usize,
}

impl RouterArgs {
    pub fn mode(&self) -> RouterMode {
        match self.router {
            RouterKind::Basic => RouterMode::Basic,
            RouterKind::Lookahead => RouterMode::Lookahead { window: self.window },
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, required_unless_present = "reference_corpus")]
    pub width: Option<u32>,
    #[arg(long, required_unless_present = "reference_corpus")]
    pub depth: Option<u32>,
    #[arg(long, default_value_t = 1.0)]
    pub density: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Probability that a layer slot starts a two-qubit gate.
    #[arg(long, default_value_t = 0.5)]
    pub two_qubit_fraction: f64,
    /// Output QASM file.
    #[arg(short, long, required_unless_present = "reference_corpus")]
    pub output: Option<PathBuf>,
    /// JSON manifest to append this circuit to (created if missing).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Write the 400-circuit reference corpus (widths 20..=200 step 20,
    /// depths 10k..=100k step 10k, densities 1.0/0.7/0.5/0.2) into this
    /// directory, seeded from --seed. Several GB of QASM.
    #[arg(long, value_name = "DIR", conflicts_with_all = ["width", "depth", "output"])]
    pub reference_corpus: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    pub input: PathBuf,
    /// grid, linear, or a JSON coupling-map file.
    #[arg(long, default_value = "grid")]
    pub topology: String,
    #[command(flatten)]
    pub router: RouterArgs,
    /// Number of sub-circuits.
    #[arg(long, default_value_t = 1)]
    pub n_sc: usize,
    /// Worker threads (default: one per sub-circuit).
    #[arg(long, env = "QSPLIT_WORKERS")]
    pub workers: Option<usize>,
    /// Output QASM file; the report goes next to it as `<output>.report.json`.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also write the single-worker baseline to this file.
    #[arg(long)]
    pub baseline_output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub original: PathBuf,
    pub compiled: PathBuf,
    /// Map used for the nearest-neighbour check.
    #[arg(long, default_value = "grid")]
    pub topology: String,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML sweep description.
    pub config: PathBuf,
    /// Keep rows already present in the output CSV and run only the rest.
    #[arg(long)]
    pub resume: bool,
    /// Run this many cells at once. Cells then compete for cores, which
    /// distorts the timing columns.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Worker threads per parallel compile (default: one per sub-circuit).
    #[arg(long, env = "QSPLIT_WORKERS")]
    pub workers: Option<usize>,
}
