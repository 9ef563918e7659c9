//! Command-line front end: image feature extraction, topic classification,
//! hedonic fits, fit comparison, sample reports, and synthetic bundles.

use clap::Parser;

mod commands;
mod pipeline;

use commands::{classify, compare, extract, fit, report, synth};

#[derive(Parser)]
#[command(
    name = "artmetrics",
    version,
    about = "Painting auction analytics: SVD-entropy image features and hedonic price models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Compute e_g, redpct, bluepct for every image in a directory.
    Extract(extract::ExtractArgs),
    /// Label auction records with title-derived topics.
    ClassifyTopic(classify::ClassifyArgs),
    /// Fit a hedonic regression and write its summary.
    Fit(fit::FitArgs),
    /// Add-one and drop-one adjusted R-squared comparison.
    Compare(compare::CompareArgs),
    /// Sample summaries: price distribution and entropy statistics.
    Report(report::ReportArgs),
    /// Generate a reproducible synthetic bundle (images, records, rates).
    Synth(synth::SynthArgs),
}

/// Error wrapper that maps to exit code 2 (bad invocation) instead of the
/// data-error code 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Extract(args) => extract::run(args),
        Command::ClassifyTopic(args) => classify::run(args),
        Command::Fit(args) => fit::run(args),
        Command::Compare(args) => compare::run(args),
        Command::Report(args) => report::run(args),
        Command::Synth(args) => synth::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        let code = if err.is::<UsageError>() { 2 } else { 1 };
        std::process::exit(code);
    }
}
