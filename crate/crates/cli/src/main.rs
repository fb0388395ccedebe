mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

/// Monochromatic components of colored cube grids and the contraction
/// pipeline that bounds them.
#[derive(Parser, Debug)]
#[command(name = "cubecolor", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Component report of a coloring, compared with the bound table.
    Analyze {
        file: PathBuf,
    },
    /// Search for colorings with small components; writes CSV rows.
    Search(SearchArgs),
    /// Run the contraction pipeline on a coloring and audit every identity.
    Certify(CertifyArgs),
    /// Fill random relative cycles and check the filling contract.
    FillTest(FillTestArgs),
    /// Print the explicit constants for dimension d and m + 1 colors.
    Bounds(BoundsArgs),
    /// Render a coloring, or a 2-dimensional slice of it, as PGM or PPM.
    Render(RenderArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Method {
    Stripe,
    Random,
    Anneal,
    Exhaustive,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(short)]
    pub d: usize,
    #[arg(short)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub colors: u32,
    /// Stripe width.
    #[arg(long, default_value_t = 2)]
    pub width: usize,
    /// First seed for random and anneal.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of consecutive seeds to run.
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    #[arg(long)]
    pub initial_temperature: Option<f64>,
    #[arg(long)]
    pub decay: Option<f64>,
    /// Cap on num_colors^(n^d) for exhaustive scans; overrides
    /// CUBECOLOR_MAX_COLORINGS.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Where to write the best coloring found.
    #[arg(long)]
    pub best: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RingArg {
    Mod2,
    Integer,
}

impl From<RingArg> for cubecolor_core::chains::Ring {
    fn from(r: RingArg) -> Self {
        match r {
            RingArg::Mod2 => cubecolor_core::chains::Ring::Mod2,
            RingArg::Integer => cubecolor_core::chains::Ring::Integer,
        }
    }
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    pub file: PathBuf,
    /// Partition shift as p/q, below 1/(4n); defaults to 1/(8n).
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long, value_enum, default_value_t = RingArg::Mod2)]
    pub ring: RingArg,
    /// Lift the d <= 3, n <= 8 size limit.
    #[arg(long)]
    pub allow_large: bool,
    /// Skip the per-part skeleton volume checks.
    #[arg(long)]
    pub no_skeleton: bool,
}

#[derive(Args, Debug)]
pub struct FillTestArgs {
    /// Number of seeds, starting at --first-seed.
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub first_seed: u64,
    #[arg(short)]
    pub d: usize,
    #[arg(short)]
    pub k: usize,
    /// Boxes in the random chain whose boundary is tested.
    #[arg(long, default_value_t = 4)]
    pub size: usize,
    #[arg(long, value_enum, default_value_t = RingArg::Mod2)]
    pub ring: RingArg,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Directory for chain dumps of failing cycles; stderr when absent.
    #[arg(long)]
    pub dump_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TableFormat {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(short)]
    pub d: usize,
    #[arg(short)]
    pub m: usize,
    /// Grid size for the n-dependent entries.
    #[arg(short)]
    pub n: Option<u64>,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    pub format: TableFormat,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ImageFormat {
    Pgm,
    Ppm,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    pub file: PathBuf,
    /// Fixed coordinates for d > 2, e.g. `x3=0,x4=5` (1-based axes,
    /// 0-based cell coordinates); exactly two axes must stay free.
    #[arg(long)]
    pub slice: Option<String>,
    #[arg(long, value_enum, default_value_t = ImageFormat::Pgm)]
    pub format: ImageFormat,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    /// An exact identity or contract check failed; the report was printed.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) | CliError::Io { .. } => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze { file } => commands::analyze(&file),
        Command::Search(args) => commands::search(&args),
        Command::Certify(args) => commands::certify(&args),
        Command::FillTest(args) => commands::fill_test(&args),
        Command::Bounds(args) => commands::bounds(&args),
        Command::Render(args) => commands::render(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cubecolor: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
