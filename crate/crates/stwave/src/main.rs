//! Thin command-line driver around the library's study runners.
//!
//! Each subcommand assembles a config, calls the corresponding function in
//! [`stwave::experiments`], and serializes the rows through
//! [`stwave::csvio`].  With `--out` the CSV goes to the given file; without
//! it, to stdout.

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use stwave::csvio;
use stwave::experiments::{
    condition_sweep, heat_study, ode_convergence, CompressionChoice, CondConfig, HeatConfig,
    HeatMode, OdeConfig,
};

#[derive(Parser)]
#[command(
    name = "stwave",
    version,
    about = "Space-time Galerkin studies: temporal wavelet compression, \
             conditioning, and the 2D heat benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Convergence sweep for the reaction ODE u' + mu*u = f on (0,T)
    Ode1d(OdeArgs),
    /// Condition numbers of the diagonally scaled temporal system A + mu*T*M
    Cond(CondArgs),
    /// 2D heat benchmark on (0,1)^2 x (0,1), full or sparse tensor product
    Heat2d(HeatArgs),
}

#[derive(Args)]
struct OdeArgs {
    /// Vanishing moments of the dual wavelets (2 or 4)
    #[arg(long, default_value_t = 2, value_parser = parse_moments)]
    moments: u32,
    /// Dyadic level range, e.g. 4..10 (inclusive)
    #[arg(long, default_value = "4..10", value_parser = parse_levels)]
    levels: RangeInclusive<u32>,
    /// Reaction coefficient
    #[arg(long, default_value_t = 10.0)]
    mu: f64,
    /// Time horizon T
    #[arg(long, default_value_t = 2.0)]
    horizon: f64,
    /// Matrix compression: "dense" or explicit "a=F,delta=F" cutoffs
    #[arg(long, default_value = "default", value_parser = parse_compression)]
    compress: CompressionChoice,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CondArgs {
    /// Comma-separated reaction coefficients
    #[arg(long, default_value = "1,10,100", value_parser = parse_mus)]
    mus: std::vec::Vec<f64>,
    /// Dyadic level range, e.g. 3..12 (inclusive); dof = 2^level
    #[arg(long, default_value = "3..12", value_parser = parse_levels)]
    levels: RangeInclusive<u32>,
    /// Time horizon T of the underlying problem
    #[arg(long, default_value_t = 2.0)]
    horizon: f64,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HeatArgs {
    /// Tensor-product mode
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    mode: ModeArg,
    /// Dyadic level range, e.g. 4..8 (inclusive); N_t = 2^level
    #[arg(long, default_value = "4..8", value_parser = parse_levels)]
    levels: RangeInclusive<u32>,
    /// GMRES relative residual tolerance
    #[arg(long, default_value_t = 1.0e-8)]
    tol: f64,
    /// GMRES iteration cap
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Sparse,
}

fn parse_moments(s: &str) -> Result<u32, String> {
    match s {
        "2" => Ok(2),
        "4" => Ok(4),
        _ => Err("supported vanishing-moment counts: 2, 4".to_string()),
    }
}

fn parse_levels(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let start: u32 = a.parse().map_err(|e| format!("bad level {a:?}: {e}"))?;
    let end: u32 = b.parse().map_err(|e| format!("bad level {b:?}: {e}"))?;
    if start > end {
        return Err(format!("empty level range {start}..{end}"));
    }
    if end > 13 {
        return Err(format!("level {end} beyond supported maximum 13"));
    }
    Ok(start..=end)
}

fn parse_compression(s: &str) -> Result<CompressionChoice, String> {
    if s == "default" {
        return Ok(CompressionChoice::Default);
    }
    if s == "dense" {
        return Ok(CompressionChoice::Dense);
    }
    let mut cutoff = None;
    let mut delta = None;
    for part in s.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got {part:?}"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|e| format!("bad value in {part:?}: {e}"))?;
        match key.trim() {
            "a" => cutoff = Some(value),
            "delta" => delta = Some(value),
            other => return Err(format!("unknown compression key {other:?}")),
        }
    }
    match (cutoff, delta) {
        (Some(cutoff), Some(delta)) => Ok(CompressionChoice::Window { cutoff, delta }),
        _ => Err("compression needs both a=F and delta=F (or \"dense\")".to_string()),
    }
}

fn parse_mus(s: &str) -> Result<Vec<f64>, String> {
    let mus: Result<Vec<f64>, _> = s.split(',').map(|m| m.trim().parse::<f64>()).collect();
    let mus = mus.map_err(|e| format!("bad mu list {s:?}: {e}"))?;
    if mus.is_empty() {
        return Err("need at least one mu".to_string());
    }
    Ok(mus)
}

fn emit(text: &str, out: Option<&PathBuf>) -> stwave::Result<()> {
    match out {
        Some(path) => {
            csvio::write_report(path, text)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> stwave::Result<()> {
    match cli.command {
        Cmd::Ode1d(args) => {
            let cfg = OdeConfig {
                dual_order: args.moments,
                levels: args.levels,
                mu: args.mu,
                horizon: args.horizon,
                compression: args.compress,
            };
            let rows = ode_convergence(&cfg)?;
            emit(&csvio::ode_csv(&cfg, &rows), args.out.as_ref())
        }
        Cmd::Cond(args) => {
            let cfg = CondConfig {
                levels: args.levels,
                mus: args.mus,
                horizon: args.horizon,
            };
            let rows = condition_sweep(&cfg)?;
            emit(&csvio::cond_csv(&cfg, &rows), args.out.as_ref())
        }
        Cmd::Heat2d(args) => {
            let cfg = HeatConfig {
                mode: match args.mode {
                    ModeArg::Full => HeatMode::Full,
                    ModeArg::Sparse => HeatMode::Sparse,
                },
                levels: args.levels,
                tol: args.tol,
                max_iterations: args.max_iterations,
            };
            let rows = heat_study(&cfg)?;
            emit(&csvio::heat_csv(&cfg, &rows), args.out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
