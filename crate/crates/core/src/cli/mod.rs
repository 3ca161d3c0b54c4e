//! The `hallmild` command-line driver.
//!
//! Exit codes: 0 success (converged / all checks pass), 2 diverged or a failed
//! check, 3 iteration limit reached, 64 bad usage, config or input data,
//! 70 numerical failure, 74 I/O error.

mod commands;
pub mod config;
pub mod describe;
pub mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;
pub use manifest::{read_manifest, FileEntry, Manifest, OutputDir, MANIFEST};

use crate::besov::Flavor;
use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIVERGED: i32 = 2;
pub const EXIT_MAX_ITER: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_SOFTWARE: i32 = 70;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "hallmild", version, about = "Picard iteration and diagnostics for mild Hall-MHD solutions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed for random data families and the battery corpus.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, value_name = "N", env = "HALLMILD_THREADS")]
    pub threads: Option<usize>,
    /// Output directory (overrides `[output] dir`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Print the columns of every CSV file and exit.
    #[arg(long, global = true)]
    pub describe_output: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Picard iteration for the configured data.
    Run,
    /// Amplitude sweep locating the convergence threshold.
    Sweep {
        /// Comma-separated amplitudes (overrides `[sweep] amplitudes`).
        #[arg(long, value_delimiter = ',')]
        amplitudes: Option<Vec<f64>>,
        /// Bracket refinement rounds (overrides `[sweep] refine_rounds`).
        #[arg(long)]
        refine: Option<usize>,
    },
    /// Localized data on growing boxes at fixed grid spacing.
    Boxsize {
        /// Comma-separated increasing box factors; the first is the configured box.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
        factors: Vec<usize>,
    },
    /// Besov block report of a field file.
    Norms {
        /// `.hmf` field file (slice or space-time).
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, value_parser = parse_flavor)]
        flavor: Option<Flavor>,
    },
    /// Inequality battery on a random heat-flow corpus.
    Verify {
        /// Corpus size (overrides `[battery] samples`).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Strong-form IMEX reference run from the configured data.
    Reference,
    /// Compare a Picard run with an IMEX run.
    ///
    /// With `--mild` and `--imex` the two output directories are read;
    /// otherwise both solvers run from the config at `dt` and `dt/2`.
    Compare {
        #[arg(long, requires = "imex")]
        mild: Option<PathBuf>,
        #[arg(long, requires = "mild")]
        imex: Option<PathBuf>,
    },
}

fn parse_flavor(s: &str) -> Result<Flavor, String> {
    match s {
        "spatial" | "isotropic-spatial" => Ok(Flavor::IsotropicSpatial),
        "anisotropic" | "anisotropic-spacetime" => Ok(Flavor::AnisotropicSpacetime),
        _ => Err(format!("unknown flavor {s:?} (spatial | anisotropic)")),
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        Error::NonFinite(_) | Error::Stability { .. } | Error::ToleranceNotReached { .. } | Error::SingularExtension(_) => {
            EXIT_SOFTWARE
        }
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if cli.global.describe_output {
        print!("{}", describe::render());
        return EXIT_OK;
    }
    let Some(command) = cli.command else {
        eprintln!("hallmild: no subcommand given (try --help)");
        return EXIT_USAGE;
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.global.threads {
        if n == 0 {
            eprintln!("hallmild: --threads must be positive");
            return EXIT_USAGE;
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("hallmild: cannot start thread pool: {e}");
            return EXIT_SOFTWARE;
        }
    };
    match pool.install(|| commands::dispatch(&cli.global, &command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hallmild: error: {e}");
            exit_code_for(&e)
        }
    }
}
