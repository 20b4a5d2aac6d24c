//! `xvariety`: invariants, variety checks, reconstruction and seeded verification
//! suites from the command line.
//!
//! Inputs are JSON on stdin (or a file / `--json`), outputs are JSON on stdout,
//! diagnostics go to stderr. Exit codes: 0 success, 1 verification failure,
//! 2 usage or schema error.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CliError, Outcome};

#[derive(Parser, Debug)]
#[command(name = "xvariety", version, about = "Cross-ratio variety toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Comparison tolerance for exact identities.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Master seed of the sample streams.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Samples per suite.
    #[arg(long, global = true, default_value_t = 1000)]
    pub samples: usize,
    /// Finite-difference step.
    #[arg(long, global = true, default_value_t = 1e-5)]
    pub hstep: f64,
    /// Exit with status 1 when a single-point check fails.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// JSON input file; stdin when omitted or `-`.
    pub file: Option<String>,
    /// Inline JSON input.
    #[arg(long, conflicts_with = "file")]
    pub json: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cross-ratios, Cartan invariants and identity residuals of a quadruple.
    Invariants(Input),
    /// Variety residuals, singular flags, rank, CR generator and Levi form of a triple.
    Check(Input),
    /// Singular-set membership of a triple.
    Classify(Input),
    /// A quadruple realising a triple, through the J chart.
    Reconstruct(Input),
    /// The normalised quadruple of a triple and its Cartan invariants.
    NormalForm(Input),
    /// The involution of a triple, the similarities g1, g4 and the theorem report.
    Involute(Input),
    /// Finite-difference psc and spsc checks at a triple.
    VerifyPsc(Input),
    /// Seeded verification suites.
    Verify {
        /// Suite to run: all, variety, invariance, lemma-xa, levi, psc, spsc, reconstruction, giT, degenerate.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(Outcome { output, ok }) => {
            print!("{}", xvariety::json::to_string(&output));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
