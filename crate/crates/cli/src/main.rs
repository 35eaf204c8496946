mod commands;
mod manifest;
mod render;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;
use zetaforge::reducer::Family;

pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_DEFECT: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "zetaforge", version, about = "Exact zeta-value forms of Beukers-type integrals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Working precision in decimal digits.
    #[arg(long, global = true, default_value_t = 50, value_parser = clap::value_parser!(u32).range(30..=100))]
    pub digits: u32,
    /// Cache directory (default: $ZETAFORGE_CACHE, then ./zetaforge-cache).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Also write the result document to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact form of one family member, with its numeric value.
    Form {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long)]
        n: u32,
        /// Largest n accepted without complaint.
        #[arg(long, default_value_t = 12)]
        n_ceiling: u32,
    },
    /// Recheck the low-order closed forms, residuals and decay certificates.
    VerifyPaper,
    /// Sup constants and decay certificates for all families.
    Bounds,
    /// Growth of psi(n) = log lcm(1..n).
    Lcm {
        #[arg(long, default_value_t = 1_000_000)]
        nmax: u64,
        #[arg(long, default_value_t = 2000)]
        exact_upto: u64,
    },
    /// Denominators of the forms against lcm powers.
    Denoms {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long, default_value_t = 6)]
        nmax: u32,
    },
    /// |I_n| against the sup-constant bound.
    Decay {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long, default_value_t = 8)]
        nmax: u32,
    },
    /// Monte Carlo estimate of the unreduced integral.
    Mc {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Inspect or check the form cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    /// Print the cache directory in use.
    Path,
    /// List cached entries.
    List,
    /// Recompute cached forms and compare byte for byte.
    Verify,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse()
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Defect(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Defect(_) => EXIT_DEFECT,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &outcome.document) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(EXIT_DEFECT);
                }
            }
            ExitCode::from(outcome.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
