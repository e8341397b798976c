use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use steklov::cli::{execute, is_usage_error, Command, Format, Method, Preset, RunConfig, Surface};
use steklov::experiments::BoundKind;

/// Steklov spectra, degeneration sweeps and the acceptance suite.
#[derive(Debug, Parser)]
#[command(name = "steklov", version)]
struct Args {
    /// constants, spectrum, sweep, compare, bounds, cutoff or verify
    command: Command,
    /// disk, cylinder (or annulus), mobius
    #[arg(long)]
    surface: Option<Surface>,
    /// Cylinder or Möbius height
    #[arg(long = "T", visible_alias = "height")]
    height: Option<f64>,
    /// Constant boundary density
    #[arg(long, default_value_t = 1.0)]
    density: f64,
    /// Number of eigenvalues, the zero one included
    #[arg(long, default_value_t = 8)]
    count: usize,
    /// closed-form, fem or both
    #[arg(long, default_value = "closed-form")]
    method: Method,
    /// Target mesh edge length
    #[arg(long, default_value_t = steklov::experiments::DEFAULT_RESOLUTION)]
    resolution: f64,
    /// Neck radii, strictly decreasing, comma separated
    #[arg(long, value_delimiter = ',')]
    rho: Vec<f64>,
    #[arg(long)]
    k: Option<usize>,
    /// two-disks, k-disks, two-disks-interior, catenoid-disk, mobius-critical
    #[arg(long)]
    preset: Option<Preset>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random metrics per bound check
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// hps-disk or karpukhin-annulus
    #[arg(long)]
    bound: Option<BoundKind>,
    /// Output directory; STEKLOV_OUT takes precedence
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// json or csv
    #[arg(long, default_value = "json")]
    format: Format,
}

impl Args {
    fn into_config(self) -> RunConfig {
        let out = match std::env::var_os("STEKLOV_OUT") {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.out,
        };
        RunConfig {
            command: self.command,
            surface: self.surface,
            height: self.height,
            density: self.density,
            count: self.count,
            method: self.method,
            resolution: self.resolution,
            rho: self.rho,
            k: self.k,
            preset: self.preset,
            seed: self.seed,
            trials: self.trials,
            bound: self.bound,
            out,
            format: self.format,
        }
    }
}

fn main() -> ExitCode {
    let cfg = Args::parse().into_config();
    match execute(&cfg) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            println!("{}: {}", if outcome.pass { "ok" } else { "FAILED" }, outcome.summary);
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) if is_usage_error(&e) => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
