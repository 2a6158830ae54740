//! Command-line front end.
//!
//! Exit codes: 0 = solved and every check passed; 2 = input/parameter
//! error; 3 = an invariant, bound, or certificate check failed.

mod commands;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "hypercover", version, about = "Distributed-style hypergraph vertex cover solver with exact runtime verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance and emit a verified run record.
    Solve(commands::SolveArgs),
    /// Generate an instance file.
    Gen(commands::GenArgs),
    /// Run invariant and ratio checks over an instance sweep.
    Verify(commands::VerifyArgs),
    /// Star benchmark sweep over a list of maximum degrees.
    Bench(commands::BenchArgs),
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad input or parameters (exit 2).
    Input(String),
    /// A violated invariant, bound, or certificate (exit 3).
    Violation(String),
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Failure {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => commands::solve(args),
        Command::Gen(args) => commands::gen(args),
        Command::Verify(args) => commands::verify(args),
        Command::Bench(args) => commands::bench(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(3)
        }
    }
}
