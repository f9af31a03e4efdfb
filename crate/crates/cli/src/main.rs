//! `casimir` command-line tool.
//!
//! Data goes to standard output (or `--output`), the run manifest and any
//! warnings go to standard error. Exit codes: 0 success, 2 configuration,
//! 3 convergence, 4 fit failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod manifest;
mod output;

use commands::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "casimir",
    version,
    about = "Sphere–plate Casimir forces from dielectric models"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOptions,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOptions {
    /// Relative tolerance of the force integrals.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub rel_tol: f64,
    /// Absolute tolerance of the force integrals, in pN.
    #[arg(long = "abs-tol-pN", global = true, default_value_t = 1e-6)]
    pub abs_tol_pn: f64,
    /// Extra bisections allowed per adaptive integral.
    #[arg(long, global = true, default_value_t = 200)]
    pub max_subdiv: usize,
    /// Noise seed for calibrate-sim (overrides the config's rng_seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// calibrate-sim: also write the scan, parabola and force covariance CSVs.
    #[arg(long, global = true)]
    pub emit_scans: bool,
    /// Write data here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Args)]
pub struct Materials {
    /// Sphere material: preset name or model JSON file.
    #[arg(long)]
    pub sphere: String,
    /// Plate material: preset name or model JSON file.
    #[arg(long)]
    pub plate: String,
    /// Sphere radius in µm.
    #[arg(long = "radius-um")]
    pub radius_um: f64,
}

#[derive(Debug, Clone, Args)]
pub struct Range {
    #[arg(long = "d-min-nm")]
    pub d_min_nm: f64,
    #[arg(long = "d-max-nm")]
    pub d_max_nm: f64,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    pub spacing: Spacing,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Force at one separation, as JSON.
    Force {
        #[command(flatten)]
        materials: Materials,
        #[arg(long = "separation-nm")]
        separation_nm: f64,
    },
    /// Force over a separation range, as CSV.
    Sweep {
        #[command(flatten)]
        materials: Materials,
        #[command(flatten)]
        range: Range,
    },
    /// Windowed-to-unwindowed force ratio for one base model on both surfaces.
    Ratio {
        /// Base material: preset name or model JSON file.
        #[arg(long)]
        base: String,
        #[arg(long = "window-min-um")]
        window_min_um: f64,
        #[arg(long = "window-max-um")]
        window_max_um: f64,
        #[arg(long = "radius-um")]
        radius_um: f64,
        #[command(flatten)]
        range: Range,
    },
    /// ε(iξ) from an absorption table by Kramers–Kronig.
    Kk {
        /// CSV with header omega_rad_per_s,eps_imag or wavelength_um,eps_imag.
        #[arg(long)]
        table: PathBuf,
        #[arg(long = "xi-min")]
        xi_min: f64,
        #[arg(long = "xi-max")]
        xi_max: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Low-frequency extrapolation; inferred from the first samples if omitted.
        #[arg(long, value_enum)]
        low_tail: Option<LowTailArg>,
        #[arg(long, default_value_t = casimir::dielectric::HighTail::DEFAULT_EXPONENT)]
        high_tail_exponent: f64,
        #[arg(long, default_value_t = casimir::dielectric::HighTail::DEFAULT_CUTOFF_FACTOR)]
        high_tail_cutoff_factor: f64,
    },
    /// Simulate a calibration run and print the report JSON.
    CalibrateSim {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the built-in material presets, or print one as a model file.
    Presets { name: Option<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LowTailArg {
    DrudeLike,
    LinearToZero,
    Zero,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, message }) => {
            if !message.is_empty() {
                eprintln!("error: {message}");
            }
            ExitCode::from(code)
        }
    }
}
