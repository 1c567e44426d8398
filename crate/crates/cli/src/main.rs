use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use critconst::io::Format;
use critconst::{ErrorRate, ProcedureFamily};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "critconst", version, about = "Critical constants for kFWER and FDP control under arbitrary dependence")]
struct Cli {
    /// Worker threads for simulation (defaults to the number of logical cores)
    #[arg(long, env = "CRITCONST_THREADS", global = true)]
    threads: Option<usize>,

    /// Log more (-v info, -vv debug)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write to this file instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,

    #[arg(long, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct RateArgs {
    /// kfwer-su, kfwer-sd, fdp-su or fdp-sd
    #[arg(long)]
    rate: ErrorRate,

    /// Number of hypotheses
    #[arg(long)]
    n: Option<usize>,

    /// k for the kFWER rates
    #[arg(long)]
    k: Option<usize>,

    /// FDP tolerance γ for the FDP rates
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the associated matrix of an error rate
    Matrix {
        #[command(flatten)]
        rate: RateArgs,
        #[command(flatten)]
        out: OutputArgs,
    },

    /// Generate critical constants: raw, rescaled (--rate) or modified (--modified)
    Constants {
        /// bh, rs, by or gr
        #[arg(long)]
        family: ProcedureFamily,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        gamma: Option<f64>,
        /// Rescale onto the feasible set of this error rate
        #[arg(long)]
        rate: Option<ErrorRate>,
        /// Replace the rescaled constants by the LP solution
        #[arg(long, requires = "rate")]
        modified: bool,
        /// Multiply the result by α
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },

    /// Solve the linear program for uniformly improved constants
    Optimize {
        #[command(flatten)]
        rate: RateArgs,
        /// Floor family, rescaled before solving (bh or rs)
        #[arg(long, default_value = "bh", conflicts_with = "input")]
        family: ProcedureFamily,
        /// Feasible floor constants read from a file instead of --family
        #[arg(long)]
        input: Option<PathBuf>,
        /// Objective row weights, one per line
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Give up after this many simplex pivots
        #[arg(long, default_value_t = 1_000_000)]
        max_pivots: usize,
        #[command(flatten)]
        out: OutputArgs,
    },

    /// Check a constant vector against the associated matrix
    Verify {
        #[command(flatten)]
        rate: RateArgs,
        /// Constants file (CSV or JSON)
        #[arg(long, required_unless_present = "family")]
        input: Option<PathBuf>,
        /// Check the raw constants of a family instead of a file
        #[arg(long, conflicts_with = "input")]
        family: Option<ProcedureFamily>,
        #[command(flatten)]
        out: OutputArgs,
    },

    /// Apply a procedure to observed p-values
    Adjust {
        #[command(flatten)]
        rate: RateArgs,
        /// P-values, one per line or `label,value`
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "bh")]
        family: ProcedureFamily,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        modified: bool,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },

    /// Monte Carlo power study under equicorrelated normal statistics
    Simulate {
        #[arg(long)]
        n: usize,
        /// Effect sizes of the false hypotheses
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 3.0])]
        d: Vec<f64>,
        /// Numbers of true nulls (default: 0, n/4, n/2, 3n/4, n)
        #[arg(long, value_delimiter = ',')]
        true_counts: Option<Vec<usize>>,
        #[arg(long, default_value_t = 20_000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        /// α for the FDP procedures
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.05)]
        gamma: f64,
        /// Level of the FDR procedures
        #[arg(long, default_value_t = 0.05)]
        q: f64,
        /// Write per-replication rejection counts to this file
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("critconst: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
