//! `incidence`: batch front end for the point-circle incidence toolkit.

mod commands;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 1729;

#[derive(Parser, Debug)]
#[command(name = "incidence", version, about = "Exact point-circle incidences in R^3")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Cross-check results against an independent computation; exit 3 on mismatch.
    #[arg(long, global = true)]
    pub verify: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Bruteforce,
    Partition,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Grid,
    CappedSpheres,
    UnitBundle,
    Random,
    TriangleCloud,
}

/// A polynomial in canonical text, from a file or inline with `;` between terms.
#[derive(Args, Debug, Clone)]
pub struct PolyArg {
    #[arg(long, conflicts_with = "terms")]
    pub poly: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub terms: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance file.
    Gen {
        #[arg(long, value_enum, default_value_t = Kind::Random)]
        kind: Kind,
        #[arg(long, default_value_t = 100)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count incidences.
    Count {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Partition)]
        method: Method,
        #[arg(long, default_value_t = 8)]
        r: usize,
    },
    /// Circle/surface crossings for every circle of an instance.
    Crossings {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        poly: PolyArg,
    },
    /// Build an r-partitioning polynomial for the instance's points.
    Partition {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 8)]
        r: usize,
    },
    /// Flecnode polynomial of a surface.
    Flecnode {
        #[command(flatten)]
        poly: PolyArg,
    },
    /// Ruledness test.
    Ruled {
        #[command(flatten)]
        poly: PolyArg,
        /// Lines to slice when hunting for a witness point.
        #[arg(long, default_value_t = 2000)]
        budget: usize,
    },
    /// Pluecker coordinates of the line base + t dir.
    Plucker {
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
    },
    /// Count triangles similar to a shape.
    Triangles {
        #[arg(long = "in", conflicts_with = "t")]
        input: Option<PathBuf>,
        /// Size of a generated cloud.
        #[arg(long)]
        t: Option<usize>,
        /// Three vertices `x,y,z;x,y,z;x,y,z`.
        #[arg(long, allow_hyphen_values = true, default_value = "0,0,0;1,0,0;0,1,0")]
        shape: String,
    },
    /// Unit circles: the sigma surface of o, a or the rich unit circles of an instance.
    Unit {
        #[arg(long, allow_hyphen_values = true, requires = "a")]
        o: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "o")]
        a: Option<String>,
        #[arg(long = "in", conflicts_with_all = ["o", "a"])]
        input: Option<PathBuf>,
    },
    /// Evaluate the closed-form bounds.
    Bounds {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        q: u64,
        #[arg(long, default_value_t = 4)]
        k: u64,
        #[arg(long, default_value_t = 3)]
        d: u32,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 2.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        constant: f64,
        /// Comma-separated bound names; all when omitted.
        #[arg(long)]
        which: Option<String>,
    },
    /// Grid of generated instances with measured counts, bounds and rich-point censuses.
    Sweep {
        /// Values of m = n.
        #[arg(long, default_value = "50,100,200")]
        sizes: String,
        /// Caps; `n` stands for the cell's n.
        #[arg(long, default_value = "1,n")]
        qs: String,
        #[arg(long, default_value = "8")]
        rs: String,
        /// Richness threshold for the rich-point census.
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Kind::Random)]
        kind: Kind,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.global.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.jobs)
            .build_global()
            .expect("thread pool is built once");
    }
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
