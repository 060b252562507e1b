use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eppm_cli::commands::{cmd_bounds, cmd_design, cmd_frontier, cmd_simulate};
use eppm_cli::config::CommonArgs;
use eppm_cli::CliError;

/// Expurgated PPM designs, union bounds, and BER simulation.
#[derive(Debug, Parser)]
#[command(name = "eppm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Construct and verify a cyclic difference set.
    Design(CommonArgs),
    /// Union-bound SER/BER curves as CSV.
    Bounds(CommonArgs),
    /// Monte-Carlo BER sweep, joined with the bound columns.
    Simulate(CommonArgs),
    /// Spectral efficiency against required SNR at a target BER.
    Frontier(CommonArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut err = io::stderr();
    match cli.command {
        Command::Design(a) => cmd_design(&a.resolve()?, &mut out),
        Command::Bounds(a) => cmd_bounds(&a.resolve()?, &mut out),
        Command::Simulate(a) => cmd_simulate(&a.resolve()?, &mut out, &mut err),
        Command::Frontier(a) => cmd_frontier(&a.resolve()?, &mut out),
    }?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
