//! `flicker` — synthesize heavy-tailed packet traffic and pulse trains,
//! estimate their power spectra, and compare against analytic predictions.

mod commands;
mod manifest;
mod selftest;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "flicker",
    version,
    about = "Pulse-train and packet-traffic spectral toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate packet traffic from a JSON config and write a trace file.
    Simulate(commands::SimulateArgs),
    /// Estimate the PSD of a trace file.
    Spectrum(commands::SpectrumArgs),
    /// Evaluate an analytic spectrum on a log grid.
    Analytic(commands::AnalyticArgs),
    /// Log-binned inter-packet gap histogram of a trace.
    Histogram(commands::HistogramArgs),
    /// Compare two spectrum files over a band.
    Compare(commands::CompareArgs),
    /// Run the fast built-in verification subset.
    Selftest,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Spectrum(args) => commands::spectrum(args),
        Command::Analytic(args) => commands::analytic(args),
        Command::Histogram(args) => commands::histogram(args),
        Command::Compare(args) => commands::compare(args),
        Command::Selftest => selftest::run(),
    };
    match outcome {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}
