//! Command-line driver writing plot-ready tables and running the acceptance battery.

mod commands;
mod config;
mod table;

use clap::{Parser, Subcommand};
use commands::CommandError;
use config::RunConfig;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "omegachan", version, about = "Energy-constrained superposition states and bosonic channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: RunConfig,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Second Renyi entropy of the 50:50 outputs for three inputs.
    Fig1,
    /// Bounds on the distance from the classical states, before and after attenuation.
    Fig2,
    /// Photon-number distribution of the superposition state.
    Fig3,
    /// Classicality on either side of the critical noise.
    Threshold,
    /// Heterodyne lower bound on the contraction coefficient of attenuators.
    Contraction,
    /// Output noise of the amplifier with a superposition environment.
    Noise,
    /// Runs every acceptance criterion and prints one line each.
    Acceptance,
}

fn acceptance() -> ExitCode {
    let outcomes = omegachan::acceptance::run_all();
    for o in &outcomes {
        println!("{o}");
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria pass", outcomes.len());
    if passed == outcomes.len() { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}

fn run(cli: Cli) -> Result<(), CommandError> {
    let cfg = cli.config.resolve()?;
    let table = match cli.command {
        Command::Fig1 => commands::fig1(&cfg)?,
        Command::Fig2 => commands::fig2(&cfg)?,
        Command::Fig3 => commands::fig3(&cfg)?,
        Command::Threshold => commands::threshold(&cfg)?,
        Command::Contraction => commands::contraction(&cfg)?,
        Command::Noise => commands::noise(&cfg)?,
        Command::Acceptance => unreachable!("handled before configuration"),
    };
    let text = table.render(cfg.format());
    match &cfg.out {
        Some(path) => table::write_atomic(path, &text)
            .map_err(|e| config::UsageError::new("out", format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Acceptance = cli.command {
        return acceptance();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CommandError::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CommandError::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
