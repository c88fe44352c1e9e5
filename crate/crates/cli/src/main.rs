use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod chain;
mod check;
mod io;
mod plot;
mod probe;
mod profile;
mod scalar;

#[derive(Parser)]
#[command(name = "tgeom", version, about = "World-function geometry toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every command.
#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Tolerance or numeric override, `KEY=VALUE`; repeatable.
    #[arg(long = "tol", value_name = "KEY=VALUE", global = true)]
    pub tol: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Euclideaness conditions and metric axioms on a geometry.
    Check(check::CheckArgs),
    /// Root-found and closed-form cross-section radius of a distorted segment.
    TubeProfile(profile::ProfileArgs),
    /// Simulate world chains of the distorted space-time.
    Chain(chain::ChainArgs),
    /// Evaluate scalar products or an envelope expression.
    Scalar(scalar::ScalarArgs),
    /// Count the vectors of given length parallel to a direction.
    Degeneracy(probe::ProbeArgs),
    /// Render a profile or chain CSV as SVG.
    Plot(plot::PlotArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(a) => check::run(a),
        Command::TubeProfile(a) => profile::run(a),
        Command::Chain(a) => chain::run(a),
        Command::Scalar(a) => scalar::run(a),
        Command::Degeneracy(a) => probe::run(a),
        Command::Plot(a) => plot::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tgeom: {e}");
            ExitCode::from(e.code())
        }
    }
}
