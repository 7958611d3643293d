//! `torsionlab` command-line front end.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, every check passed |
//! | 1 | usage, I/O or any other error |
//! | 2 | malformed input (JSON syntax or schema) |
//! | 3 | input is not a chain complex (`∂∂ ≠ 0`) |
//! | 4 | representation violates the surface relator |
//! | 5 | representation is reducible where irreducibility is required |
//! | 6 | cocycle violates a switch condition |
//! | 7 | a verification check ran and failed |

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use torsionlab::pairings::SymplecticForm;
use torsionlab::{Error, FieldKind};

pub const EXIT_OTHER: u8 = 1;
pub const EXIT_CHECK_FAILED: u8 = 7;

#[derive(Parser, Debug)]
#[command(name = "torsionlab", version, about = "Reidemeister torsion of chain complexes and surface representations")]
pub struct Cli {
    /// Field for the input entries: rational, quad:d or float. Representation files default to
    /// the field they declare.
    #[arg(long, global = true)]
    pub field: Option<FieldKind>,

    /// Comparison tolerance of the float field.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Seed of the single generator behind every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Torsion of a based chain complex.
    Torsion {
        complex: PathBuf,
        /// Homology basis file; defaults to the canonical basis.
        #[arg(long)]
        homology: Option<PathBuf>,
    },
    /// Verification suites on representation files.
    Verify {
        #[arg(required = true)]
        representations: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Largest relative gap accepted by the float checks (main identity and invariance).
        #[arg(long, default_value_t = 1e-6)]
        gap: f64,
        /// Random complexes in the symplectic suite.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// The Thurston form of two cocycles on a train track.
    Thurston {
        track: PathBuf,
        first: PathBuf,
        second: PathBuf,
        /// Normalization of the printed value: thurston, wp or psl2.
        #[arg(long, default_value = "thurston")]
        form: SymplecticForm,
    },
    /// Print a built-in representation as JSON.
    Fixture { name: String },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Invariance,
    MainTheorem,
    Symplectic,
    All,
}

impl Suite {
    pub fn label(self) -> &'static str {
        match self {
            Suite::Invariance => "invariance",
            Suite::MainTheorem => "main-theorem",
            Suite::Symplectic => "symplectic",
            Suite::All => "all",
        }
    }

    pub fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::NotAComplex { .. } => 3,
        Error::InvalidRepresentation { .. } => 4,
        Error::Reducible(_) => 5,
        Error::Admissibility(_) => 6,
        _ => EXIT_OTHER,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_OTHER } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("torsionlab: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
