use clap::{Parser, Subcommand};
use pam_cli::commands::{beamform, bench, compare, metrics, simulate};

/// Passive acoustic mapping: simulate cavitation RF data, beamform energy
/// maps, and score the results.
#[derive(Debug, Parser)]
#[command(name = "pam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate seeded RF acquisitions with ground truth.
    Simulate(simulate::SimulateArgs),
    /// Reconstruct an energy map from one RF file.
    Beamform(beamform::BeamformArgs),
    /// Score energy maps into a CSV table.
    Metrics(metrics::MetricsArgs),
    /// Compare beamformers over a set of RF files.
    Compare(compare::CompareArgs),
    /// Time one reconstruction setup and model its operation count.
    Bench(bench::BenchArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => simulate::run(args),
        Command::Beamform(args) => beamform::run(args),
        Command::Metrics(args) => metrics::run(args),
        Command::Compare(args) => compare::run(args),
        Command::Bench(args) => bench::run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
