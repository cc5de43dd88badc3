//! `fasisac` command-line front end.
//!
//! Logs go to stderr (`RUST_LOG`, default `info`); stdout carries one
//! machine-readable summary line per output file.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use fasisac::experiments::rows::{gnuplot_blocks, write_atomic};
use fasisac::experiments::{self, sibling_path, write_csv, SweepConfig};
use fasisac::Workers;

#[derive(Parser)]
#[command(name = "fasisac", version, about = "AI-limited fluid-antenna ISAC simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rate against the AI budget.
    RateSweep(RunArgs),
    /// Sensing distortion against the AI budget.
    DistortionSweep(RunArgs),
    /// Rate-distortion trade-off over the selection weight.
    Frontier(RunArgs),
    /// Independent-port Monte Carlo against quadrature.
    Validate(RunArgs),
    /// Numerical rank and diversity fits per geometry.
    Dof(RunArgs),
    /// Rewrites a results CSV as gnuplot index blocks.
    PlotData {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Prints the default configuration as TOML.
    DefaultConfig,
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment description; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `trials`.
    #[arg(long)]
    trials: Option<u64>,
    /// Overrides `output_path`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self, default_name: &str) -> Result<(SweepConfig, PathBuf)> {
        let mut cfg = match &self.config {
            Some(p) => SweepConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
            None => SweepConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(o) = &self.out {
            cfg.output_path = Some(o.clone());
        }
        cfg.validate()?;
        let out = cfg
            .output_path
            .clone()
            .unwrap_or_else(|| PathBuf::from(default_name));
        Ok((cfg, out))
    }
}

fn report(path: &Path, rows: usize) {
    println!("wrote {rows} rows to {}", path.display());
}

fn run(cli: Cli) -> Result<bool> {
    let workers = Workers::from_env();
    log::debug!("{} workers", workers.get());
    match cli.command {
        Command::RateSweep(args) => {
            let (cfg, out) = args.resolve("rate_sweep.csv")?;
            let rows = experiments::run_rate_sweep(&cfg, workers)?;
            write_csv(&out, &rows)?;
            report(&out, rows.len());
        }
        Command::DistortionSweep(args) => {
            let (cfg, out) = args.resolve("distortion_sweep.csv")?;
            let rows = experiments::run_distortion_sweep(&cfg, workers)?;
            write_csv(&out, &rows)?;
            report(&out, rows.len());
        }
        Command::Frontier(args) => {
            let (cfg, out) = args.resolve("frontier.csv")?;
            let result = experiments::run_frontier(&cfg, workers)?;
            let hull = sibling_path(&out, "hull");
            write_csv(&out, &result.rows)?;
            write_csv(&hull, &result.hull)?;
            report(&out, result.rows.len());
            report(&hull, result.hull.len());
        }
        Command::Validate(args) => {
            let (cfg, out) = args.resolve("validate.csv")?;
            let result = experiments::run_validation(&cfg, workers)?;
            write_csv(&out, &result.rows)?;
            report(&out, result.rows.len());
            for c in &result.checks {
                println!(
                    "{} L={} c_ai={} rate_gap={:.3e} (tol {:.3e}) distortion_gap={:.3e} (tol {:.3e})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.l,
                    c.c_ai,
                    c.rate_gap,
                    c.rate_tolerance,
                    c.distortion_gap,
                    c.distortion_tolerance
                );
            }
            return Ok(result.all_pass());
        }
        Command::Dof(args) => {
            let (cfg, out) = args.resolve("dof.csv")?;
            let result = experiments::run_dof_report(&cfg, workers)?;
            let eigen = sibling_path(&out, "eigen");
            write_csv(&out, &result.rows)?;
            write_csv(&eigen, &result.eigenvalues)?;
            report(&out, result.rows.len());
            report(&eigen, result.eigenvalues.len());
        }
        Command::PlotData { input, out } => {
            let rows = experiments::read_rows(&input)?;
            write_atomic(&out, gnuplot_blocks(&rows).as_bytes())?;
            report(&out, rows.len());
        }
        Command::DefaultConfig => print!("{}", SweepConfig::default().to_toml_string()),
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            log::error!("{e:#}");
            ExitCode::from(2)
        }
    }
}
