//! Experiment driver. Exit status: 0 all checks hold, 1 a check failed,
//! 2 invalid configuration or I/O failure.

mod commands;
mod config;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CommonArgs, RunConfig};

#[derive(Parser)]
#[command(
    name = "monogenic",
    version,
    about = "Monogenic polynomial checks in the unit ball"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gram matrices of the normalized basis.
    Gram(CommonArgs),
    /// Finite-difference checks of monogenicity, the Riesz system and derivatives.
    Monogenicity {
        #[command(flatten)]
        common: CommonArgs,
        /// Use the Condon-Shortley phase in the Legendre functions.
        #[arg(long)]
        condon_shortley: bool,
    },
    /// Bohr sums at the reference radii and majorant radii.
    Bohr(CommonArgs),
    /// Sweeps of the hypercomplex derivative estimate.
    Derivative(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (config, run): (RunConfig, fn(&RunConfig) -> commands::CmdResult) = match &cli.command {
        Command::Gram(a) => (RunConfig::new("gram", a, false), commands::gram),
        Command::Monogenicity {
            common,
            condon_shortley,
        } => (
            RunConfig::new("monogenicity", common, *condon_shortley),
            commands::monogenicity,
        ),
        Command::Bohr(a) => (RunConfig::new("bohr", a, false), commands::bohr),
        Command::Derivative(a) => (RunConfig::new("derivative", a, false), commands::derivative),
    };
    if let Err(e) = config.validate() {
        eprintln!("configuration error: {e}");
        return ExitCode::from(2);
    }
    let outcome = match run(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let out = config.out.as_ref().map(std::path::PathBuf::from);
    if let Err(e) = report::emit(&config, &outcome, out.as_deref()) {
        eprintln!("cannot write report: {e}");
        return ExitCode::from(2);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
