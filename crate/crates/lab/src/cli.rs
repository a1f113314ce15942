use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "bergman-lab", version, about = "Weighted Bergman projection experiments on the unit ball")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Weight descriptor (TOML).
    #[arg(long)]
    pub weight: Option<PathBuf>,
    /// Complex dimension of the ball.
    #[arg(long)]
    pub n: Option<usize>,
    /// Absolute and relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Radial grid r = 1 - 2^-k, k up to this value.
    #[arg(long)]
    pub kmax: Option<u32>,
    /// Cap on kernel series degree.
    #[arg(long)]
    pub dmax: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for randomized trials.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Doubling-class and regularity diagnostics for a weight.
    Diagnose {
        #[command(flatten)]
        common: Common,
    },
    /// Kernel and radial-derivative values along the first axis.
    Kernel {
        #[command(flatten)]
        common: Common,
        /// `z = z_radius·e_1`; the grid moves `w`.
        #[arg(long, default_value_t = 0.5)]
        z_radius: f64,
    },
    /// Projection of a bounded symbol and its Bloch density profile.
    Project {
        #[command(flatten)]
        common: Common,
        /// Symbol descriptor (TOML).
        #[arg(long)]
        symbol: PathBuf,
    },
    /// Full boundedness check for a weight.
    Theorem {
        #[command(flatten)]
        common: Common,
    },
    /// Hardy-Littlewood coefficient inequalities on random polynomials.
    HlCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        terms: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 4.0)]
        q: f64,
        /// Suite constant C in lhs <= C·rhs.
        #[arg(long, default_value_t = 2.0)]
        constant: f64,
    },
    /// Disk-kernel integral against the tail integral, on a grid of s.
    PrCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 0.7, 0.9, 0.99])]
        s: Vec<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Diagnose { .. } => "diagnose",
            Command::Kernel { .. } => "kernel",
            Command::Project { .. } => "project",
            Command::Theorem { .. } => "theorem",
            Command::HlCheck { .. } => "hl-check",
            Command::PrCheck { .. } => "pr-check",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Diagnose { common }
            | Command::Kernel { common, .. }
            | Command::Project { common, .. }
            | Command::Theorem { common }
            | Command::HlCheck { common, .. }
            | Command::PrCheck { common, .. } => common,
        }
    }
}
