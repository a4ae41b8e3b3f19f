//! `twinbeam`: estimate, scan, sweep and evaluate from the command line.
//!
//! Exit codes: 0 success, 2 input error, 3 infeasible estimation.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "twinbeam", version, about = "Noise model, parameter estimation and circuit evaluation for twin-beam squeezing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Invert every measurement point for (G, eta_p, eta_c) and summarize.
    Estimate {
        /// Measurement CSV.
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        eps_p: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        eps_c: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Scatter of the recovered parameters as a function of the assumed eps_p.
    ScanEps {
        input: PathBuf,
        /// Comma-separated eps_p values.
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1", allow_negative_numbers = true)]
        grid: Vec<f64>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        eps_c: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate the noise model along one parameter axis.
    Sweep(SweepArgs),
    /// Evaluate a circuit file on vacuum input.
    Eval {
        circuit: PathBuf,
        /// Parameter override `keyword[.mode].key=value`; repeatable.
        #[arg(long = "set", value_name = "OVERRIDE")]
        overrides: Vec<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Axis: gain, vp2 (probe visibility squared) or vc2.
    #[arg(long)]
    axis: String,
    /// Axis range as lo:hi.
    #[arg(long, allow_hyphen_values = true)]
    range: String,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Comma-separated subset of probe, conjugate, squeezed, antisqueezed.
    #[arg(long, value_delimiter = ',', default_value = "probe,conjugate,squeezed,antisqueezed")]
    observables: Vec<String>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    gain: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    eta_p: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    eta_c: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    v_p: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    v_c: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    eps_p: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    eps_c: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Write here instead of stdout. Nothing is written on error.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to json for `estimate`, csv otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Why a command stopped; maps onto the exit code.
enum Failure {
    Input(anyhow::Error),
    Infeasible(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Infeasible(e)) => {
            eprintln!("infeasible: {e:#}");
            ExitCode::from(3)
        }
    }
}
