//! `bdfdoc`: certification and experiment campaigns for BDF-k schemes and
//! their DOC kernels.
//!
//! Exit codes: 0 when every check passes, 1 when a certification or
//! experiment fails (or a run errors), 2 for usage and configuration errors.

// `!(x > 0.0)` is used on purpose: unlike `x <= 0.0` it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde_json::Value;

use bdfdoc_core::par::Execution;
use bdfdoc_core::spectral::DEFAULT_SEED;

use commands::{CertifyArgs, Context, ConvergeArgs, DocArgs, KernelsArgs, SpectralArgs, StabilityArgs, StartingArgs};
use config::{overlay, usage, FileConfig, UsageError};
use report::{emit, Envelope, Format, Outcome, VERSION};

#[derive(Debug, Parser)]
#[command(name = "bdfdoc", version = VERSION, about = "Certify BDF-k kernels and run convergence/stability campaigns")]
struct Cli {
    /// TOML (or .json) campaign file; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format [default: json for spectral/starting/certify, csv otherwise]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed of the randomized quadratic-form trials [default: 24301]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 1 runs everything sequentially [default: all cores]
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the BDF-k kernels as exact fractions and compare them with the table
    Kernels(KernelsArgs),
    /// Dump DOC kernels; check orthogonality and decay
    Doc(DocArgs),
    /// Generating functions, Toeplitz eigenvalues and quadratic forms
    Spectral(SpectralArgs),
    /// Starting-effect constants and cumulative sums
    Starting(StartingArgs),
    /// Run every certification and report one verdict per check and order
    Certify(CertifyArgs),
    /// Observed convergence orders over a step ladder
    Converge(ConvergeArgs),
    /// Per-step norms against the energy stability bounds
    Stability(StabilityArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Kernels(_) => "kernels",
            Command::Doc(_) => "doc",
            Command::Spectral(_) => "spectral",
            Command::Starting(_) => "starting",
            Command::Certify(_) => "certify",
            Command::Converge(_) => "converge",
            Command::Stability(_) => "stability",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Spectral(_) | Command::Starting(_) | Command::Certify(_) => Format::Json,
            _ => Format::Csv,
        }
    }
}

fn execution(jobs: Option<usize>) -> Result<Execution> {
    match jobs {
        Some(0) => Err(usage("--jobs must be at least 1")),
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| anyhow::anyhow!("configuring the worker pool: {e}"))?;
            Ok(Execution::Parallel)
        }
        _ => Ok(Execution::Parallel),
    }
}

fn run(cli: Cli) -> Result<bool> {
    let mut file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let ctx =
        Context { seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED), exec: execution(cli.jobs.or(file.jobs))? };
    let format = cli.format.or(file.format).unwrap_or_else(|| cli.command.default_format());
    let out = cli.out.clone().or_else(|| file.out.take().map(PathBuf::from));
    let name = cli.command.name();

    let (config, outcome): (Value, Outcome) = match cli.command {
        Command::Kernels(a) => commands::kernels(overlay(file.kernels, a)?, &ctx)?,
        Command::Doc(a) => commands::doc(overlay(file.doc, a)?, &ctx)?,
        Command::Spectral(a) => commands::spectral(overlay(file.spectral, a)?, &ctx)?,
        Command::Starting(a) => commands::starting(overlay(file.starting, a)?, &ctx)?,
        Command::Certify(a) => commands::certify(overlay(file.certify, a)?, &ctx)?,
        Command::Converge(a) => commands::converge(overlay(file.converge, a)?, &ctx)?,
        Command::Stability(a) => commands::stability(overlay(file.stability, a)?, &ctx)?,
    };

    let text = Envelope { command: name, seed: ctx.seed, config: &config }.render(&outcome, format)?;
    emit(&text, out.as_deref())?;
    eprintln!("bdfdoc {name}: {}", if outcome.pass { "PASS" } else { "FAIL" });
    for line in outcome.failures.iter().chain(&outcome.notes) {
        eprintln!("  {line}");
    }
    Ok(outcome.pass)
}

/// Usage errors, and library errors that stem from invalid input rather
/// than from a failed computation, exit with 2.
fn is_usage(e: &anyhow::Error) -> bool {
    if e.downcast_ref::<UsageError>().is_some() {
        return true;
    }
    matches!(
        e.downcast_ref::<bdfdoc_core::Error>(),
        Some(bdfdoc_core::Error::UnsupportedOrder(..) | bdfdoc_core::Error::Config(_))
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}
