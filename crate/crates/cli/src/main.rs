//! `rcrit`: bound tables, threshold curves, spectrum-bound evaluation, exact
//! identity checks and simulations for the critical rate `r_crit(p0, p1)`.
//!
//! Exit codes: 0 success, 1 a numerical check failed, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod table;

use commands::CliError;
use table::Format;

#[derive(Debug, Parser)]
#[command(
    name = "rcrit",
    version,
    about = "Bounds, exact checks and simulations for the critical rate r_crit(p0, p1)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Override the command's numerical tolerance (see the command help).
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct Channels {
    #[arg(long, requires = "p1", conflicts_with = "grid")]
    pub p0: Option<f64>,
    #[arg(long, requires = "p0")]
    pub p1: Option<f64>,
    /// CSV file with header `p0,p1`, one channel pair per row.
    #[arg(long)]
    pub grid: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bracket r_crit for each channel pair. Tolerance: allowed lower-upper inversion (default 1e-12).
    Bounds {
        #[command(flatten)]
        channels: Channels,
        #[command(flatten)]
        output: Output,
    },
    /// Threshold p1*(p0) of the two-hypothesis bound. Tolerance: bisection width (default 1e-9).
    Threshold {
        /// Comma-separated p0 values; defaults to 0.1,0.12,0.15,0.2,0.3,0.4,0.45,0.49.
        #[arg(long, value_delimiter = ',')]
        p0: Vec<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Spectrum bound mu(R, alpha, omega) along an omega grid, both forms. Tolerance: allowed form deviation (default 1e-8).
    Mu {
        #[arg(long = "R", visible_alias = "rate")]
        rate: f64,
        /// A number in [delta_GV(R), 1/2] or `gv` for delta_GV(R).
        #[arg(long, default_value = "gv")]
        alpha: String,
        #[arg(long, default_value_t = 16)]
        points: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Exact identity suite on seeded random codes; exits 1 on any failure. Tolerance: unused (checks are exact).
    OracleCheck {
        /// Largest block length (the suite starts at 4).
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        codes: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 24)]
        max_words: usize,
        /// Also report single-codeword diagnostics for this pair.
        #[arg(long, requires = "p1")]
        p0: Option<f64>,
        #[arg(long, requires = "p0")]
        p1: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo estimates of alpha_n and beta_n. Tolerance: standard errors allowed in the cross-check (default 3).
    Simulate {
        #[arg(long)]
        p0: f64,
        #[arg(long)]
        p1: f64,
        #[arg(long, default_value_t = 14)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        r: f64,
        /// Decision slack; defaults to p0.
        #[arg(long)]
        tau: Option<f64>,
        /// Compare against exact probabilities of the same code (n <= 24).
        #[arg(long)]
        exact_crosscheck: bool,
        /// Comma-separated slack values for an exponent sweep.
        #[arg(long, value_delimiter = ',')]
        tau_grid: Vec<f64>,
        /// Comma-separated block lengths for an exponent sweep.
        #[arg(long, value_delimiter = ',')]
        n_grid: Vec<usize>,
        #[command(flatten)]
        output: Output,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Bounds { channels, output } => commands::bounds(&channels, &output),
        Command::Threshold { p0, output } => commands::threshold(&p0, &output),
        Command::Mu {
            rate,
            alpha,
            points,
            output,
        } => commands::mu(rate, &alpha, points, &output),
        Command::OracleCheck {
            n,
            codes,
            seed,
            max_words,
            p0,
            p1,
            output,
        } => commands::oracle_check(n, codes, seed, max_words, p0.zip(p1), &output),
        Command::Simulate {
            p0,
            p1,
            n,
            trials,
            seed,
            r,
            tau,
            exact_crosscheck,
            tau_grid,
            n_grid,
            output,
        } => commands::simulate(
            &commands::SimulateArgs {
                p0,
                p1,
                n,
                trials,
                seed,
                r,
                tau,
                exact_crosscheck,
                tau_grid,
                n_grid,
            },
            &output,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rcrit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
