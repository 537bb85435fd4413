//! `rmtlab`: command-line front end for the numerical laboratory.

mod commands;
mod config;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "rmtlab", version, about = "Random-matrix and interacting-particle experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub(crate) struct Common {
    /// Seed; defaults to RMT_LAB_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV; a manifest is written next to it. Standard output otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate Dyson Brownian motion and write the trajectory.
    #[command(allow_negative_numbers = true)]
    Simulate(commands::SimulateArgs),
    /// Sine-kernel gap probability det(I - K_sin) on [0, s].
    #[command(allow_negative_numbers = true)]
    Gap(commands::GapArgs),
    /// Tracy–Widom distribution function F2(s).
    #[command(allow_negative_numbers = true)]
    Tw(commands::TwArgs),
    /// Multi-time generating functional with piecewise-constant test functions.
    #[command(allow_negative_numbers = true)]
    Genfun(commands::GenfunArgs),
    /// KS distance of a long OU run against the semicircle law.
    #[command(allow_negative_numbers = true)]
    SemicircleCheck(commands::SemicircleArgs),
    /// KS distance of soft-edge-scaled maxima against Tracy–Widom.
    #[command(allow_negative_numbers = true)]
    SoftEdgeCheck(commands::SoftEdgeArgs),
    /// Core-approximation gaps of a local functional.
    #[command(allow_negative_numbers = true)]
    CoreApprox(commands::CoreApproxArgs),
    /// Truncated ISDE drift against the truncation radius.
    #[command(allow_negative_numbers = true)]
    IsdeDiag(commands::IsdeArgs),
    /// Check a run manifest against its outputs.
    Verify(verify::VerifyArgs),
}

fn main() -> ExitCode {
    let args = match config::expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Gap(a) => commands::gap(a),
        Command::Tw(a) => commands::tw(a),
        Command::Genfun(a) => commands::genfun(a),
        Command::SemicircleCheck(a) => commands::semicircle_check(a),
        Command::SoftEdgeCheck(a) => commands::soft_edge_check(a),
        Command::CoreApprox(a) => commands::core_approx(a),
        Command::IsdeDiag(a) => commands::isde_diag(a),
        Command::Verify(a) => verify::run(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
