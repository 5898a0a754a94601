//! `nlbox`: batch verifications and reports. Exit code 0 when every check
//! passes, 1 when one fails, 2 on usage or input errors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "nlbox", version, about = "Boolean nonlocal box verifications")]
struct Cli {
    /// Print the run report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Parameter {
    #[value(name = "I", alias = "i")]
    I,
    #[value(name = "J", alias = "j")]
    J,
}

#[derive(Subcommand)]
pub enum Command {
    /// Dump the odd-parity input space and the even translation space.
    Inputs {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partition the translations into symmetry subsets.
    Partition {
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Run the structural checks.
        #[arg(long)]
        verify: bool,
        /// Stabilizer matrices listed per subset (default 4 at n = 6, else 0).
        #[arg(long)]
        matrices: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Load a reference fixture file and optionally verify it.
    Fixtures {
        /// Fixture file; the shipped n = 6 data when omitted.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Use the uncorrected published data (parsed without load checks).
        #[arg(long, conflicts_with = "file")]
        raw: bool,
        #[arg(long)]
        verify: bool,
    },
    /// Q(W=0), P(W=1) and their sum over a grid of E, as CSV.
    Tradeoff {
        #[arg(long, default_value_t = 201)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Consistency threshold of the trade-off and its exact identities.
    Tsirelson,
    /// Mean square of S over all translations.
    Variance {
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// `key = bitstring` file with x1, x2, y1, y2.
        #[arg(long)]
        settings: Option<PathBuf>,
    },
    /// Fine-grained bound over every admissible triple.
    Uncertainty {
        #[arg(long, default_value_t = 6)]
        n: usize,
    },
    /// Tripartite parameters I and J.
    Tripartite {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, value_enum)]
        parameter: Parameter,
        /// Settings evaluated by the J search.
        #[arg(long, default_value_t = nlbox_core::bounds::J_SEARCH_BUDGET)]
        budget: usize,
    },
    /// Monte Carlo estimates of Q(W=0) and P(W=1).
    Mc {
        /// Success probability, decimal or `a/b`.
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// CHSH maximum over an angle grid for the invariant correlation.
    Invariant {
        #[arg(long, default_value_t = 24)]
        grid: usize,
        /// CSV slice at the maximizing Alice angles.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// S and W for a settings quadruple with the imperfect box.
    Chsh {
        #[arg(long)]
        settings: Option<PathBuf>,
        #[arg(long, default_value = "1")]
        p: String,
    },
    /// Sample outcome pairs from the imperfect box.
    Sample {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value = "1")]
        p: String,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.command) {
        Ok(report) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            } else {
                print!("{}", report.render_text());
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                for c in report.checks.iter().filter(|c| !c.pass) {
                    eprintln!("check failed: {}", c.name);
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
