//! `aulf`: generate graph families, build band-sparse approximations of their
//! normalized Laplacians, and report obstruction bounds.
//!
//! Exit codes: 0 success, 2 parameter error, 3 precondition violation,
//! 4 non-convergence (outputs are still written).

mod approximate;
mod args;
mod decompose;
mod diagnose;
mod error;
mod generate;
mod norm;
mod output;

use clap::{Parser, Subcommand};

use crate::error::CliError;
use crate::output::Emitter;

#[derive(Parser)]
#[command(
    name = "aulf",
    version,
    about = "Band-sparse approximation workbench for graph Laplacians"
)]
struct Cli {
    /// Omit the generation timestamp so repeated runs are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write graph families, operators and edge-addition plans.
    Generate(generate::GenerateArgs),
    /// Build an approximant with a certified error bound and measure it.
    Approximate(approximate::ApproximateArgs),
    /// Report lower bounds on the distance to band-sparse operators.
    Diagnose(diagnose::DiagnoseArgs),
    /// Estimate the operator norm of a matrix.
    Norm(norm::NormArgs),
    /// Split a regular 0/1 matrix into permutation matrices.
    Decompose(decompose::DecomposeArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let timestamp = !cli.no_timestamp;
    match cli.command {
        Command::Generate(a) => generate::run(a, Emitter::new("generate", timestamp)),
        Command::Approximate(a) => approximate::run(a, Emitter::new("approximate", timestamp)),
        Command::Diagnose(a) => diagnose::run(a, Emitter::new("diagnose", timestamp)),
        Command::Norm(a) => norm::run(a, Emitter::new("norm", timestamp)),
        Command::Decompose(a) => decompose::run(a, Emitter::new("decompose", timestamp)),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("aulf: {e}");
        std::process::exit(e.exit_code());
    }
}
