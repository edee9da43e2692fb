//! `gebridge`: closed-form Gilbert-Elliott parameters from Gaussian fading
//! kernels, Monte Carlo validation, and first-order fidelity diagnostics.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::Overrides;
use output::Format;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gebridge", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Shared {
    /// Flat key=value config file; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Kernel family: sqexp | exp
    #[arg(long)]
    kernel: Option<String>,
    /// Kernel variance K(0)
    #[arg(long)]
    sigma2: Option<f64>,
    /// Slot spacing
    #[arg(long)]
    d: Option<f64>,
    /// Threshold in units of the process standard deviation
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Slots per replicate
    #[arg(long)]
    slots: Option<usize>,
    /// Number of replicates
    #[arg(long)]
    reps: Option<usize>,
    /// Worker threads (0 = all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Output format: csv | json
    #[arg(long)]
    format: Option<Format>,
    /// Write output here instead of stdout
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form chain parameters for one configuration
    Params {
        #[command(flatten)]
        shared: Shared,
        /// Correlation length t_c (same unit as --d)
        #[arg(long)]
        tc: Option<f64>,
        /// One-step correlation, bypassing the kernel
        #[arg(long, allow_negative_numbers = true)]
        rho: Option<f64>,
    },
    /// Simulate thresholded traces and compare rates to the closed form
    Simulate {
        #[command(flatten)]
        shared: Shared,
        /// Correlation length t_c (same unit as --d)
        #[arg(long)]
        tc: Option<f64>,
        /// Also write the raw traces to this path
        #[arg(long)]
        traces: Option<PathBuf>,
        /// Trace file format: text | binary
        #[arg(long, default_value = "text")]
        trace_format: commands::simulate::TraceFormat,
    },
    /// Fidelity table over a (tc, s, kernel) grid
    ValidateTable {
        #[command(flatten)]
        shared: Shared,
        /// Restrict an axis: tc=2,5 s=0 kernel=exp (repeatable)
        #[arg(long, num_args = 1..)]
        grid: Vec<String>,
        /// Exit 3 if any row breaches the fidelity thresholds
        #[arg(long)]
        strict: bool,
    },
    /// Persistence growth across coherence times, with fits
    Scaling {
        #[command(flatten)]
        shared: Shared,
        #[arg(long, default_value_t = 20.0)]
        tc_min: f64,
        #[arg(long, default_value_t = 100.0)]
        tc_max: f64,
        #[arg(long, default_value_t = 9)]
        points: usize,
        /// Skip the Monte Carlo columns
        #[arg(long)]
        no_mc: bool,
    },
    /// Markov-gap and run-length diagnostics for listed coherence times
    Diagnose {
        #[command(flatten)]
        shared: Shared,
        /// Coherence times, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        tc: Vec<f64>,
    },
}

impl Shared {
    fn overrides(&self, tc: Option<f64>, rho: Option<f64>) -> Overrides {
        Overrides {
            config: self.config.clone(),
            kernel: self.kernel.clone(),
            tc,
            sigma2: self.sigma2,
            d: self.d,
            s: self.s,
            rho,
            seed: self.seed,
            slots: self.slots,
            reps: self.reps,
            jobs: self.jobs,
            format: self.format,
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let (shared, tc, rho) = match &cli.cmd {
        Cmd::Params { shared, tc, rho } => (shared, *tc, *rho),
        Cmd::Simulate { shared, tc, .. } => (shared, *tc, None),
        Cmd::ValidateTable { shared, .. }
        | Cmd::Scaling { shared, .. }
        | Cmd::Diagnose { shared, .. } => (shared, None, None),
    };
    let p = config::resolve(&shared.overrides(tc, rho))?;
    let format = p.format.unwrap_or(Format::Csv);
    ge_bridge::parallel::configure_threads(p.jobs);
    let out_path = shared.out.as_deref();

    let code = match &cli.cmd {
        Cmd::Params { .. } => {
            let content = commands::params::run(&p, format)?;
            output::write_out(out_path, &content)?;
            ExitCode::SUCCESS
        }
        Cmd::Simulate {
            traces,
            trace_format,
            ..
        } => {
            let content = commands::simulate::run(&p, format, traces.as_deref(), *trace_format)?;
            output::write_out(out_path, &content)?;
            ExitCode::SUCCESS
        }
        Cmd::ValidateTable { grid, strict, .. } => {
            let grid = commands::validate_table::parse_grid(grid)?;
            let res = commands::validate_table::run(&p, &grid, format)?;
            output::write_out(out_path, &res.content)?;
            if res.any_row_failed {
                eprintln!("validate-table: some rows failed to compute");
                ExitCode::from(2)
            } else if *strict && res.strict_violations > 0 {
                eprintln!(
                    "validate-table: {} row(s) breach the strict fidelity thresholds",
                    res.strict_violations
                );
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Cmd::Scaling {
            tc_min,
            tc_max,
            points,
            no_mc,
            ..
        } => {
            let content = commands::scaling::run(&p, *tc_min, *tc_max, *points, !no_mc, format)?;
            output::write_out(out_path, &content)?;
            ExitCode::SUCCESS
        }
        Cmd::Diagnose { tc, .. } => {
            let content = commands::diagnose::run(&p, tc, format)?;
            output::write_out(out_path, &content)?;
            ExitCode::SUCCESS
        }
    };
    Ok(code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
