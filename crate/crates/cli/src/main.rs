//! `bidisk-ar`: feasibility, filter design, covariance extension and
//! Nehari extension from JSON documents.
//!
//! Exit codes: 0 success, 1 input error, 2 infeasible, 3 instability or
//! convergence failure.

mod commands;
mod doc;
#[cfg(test)]
mod tests;

use std::path::PathBuf;
use std::process::ExitCode;

use bidisk_ar::Error;
use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "bidisk-ar", version, about = "Two-variable AR filter design and Nehari extension")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub cfg: JobConfig,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Test the feasibility conditions of a correlation band.
    Check,
    /// Construct the stable filters p and r.
    Design,
    /// Extend the covariance over {-J..J}² (input: grid or design output).
    Extend,
    /// Tabulate (p p*)⁻¹ on the torus (input: grid or design output).
    Spectrum,
    /// One-variable suboptimal Nehari extension.
    Nehari1d,
    /// Two-variable (little Hankel) suboptimal Nehari extension.
    Nehari2d,
}

#[derive(Debug, Clone, clap::Args)]
pub struct JobConfig {
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Defaults to standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = bidisk_ar::ar2d::DEFAULT_TOL_COMM)]
    pub tol_comm: f64,
    #[arg(long, global = true, default_value_t = bidisk_ar::covariance::DEFAULT_PD_TOL)]
    pub tol_pd: f64,
    #[arg(long, global = true, default_value_t = bidisk_ar::ar2d::DEFAULT_STABILITY_MARGIN)]
    pub margin: f64,
    /// Tolerance of the two-variable Nehari checks.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,
    /// Torus grid for coefficient extraction.
    #[arg(long, global = true, default_value_t = 512)]
    pub fft_n: usize,
    /// Stability sweep grid (design); output grid (spectrum, default 64).
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    /// Hankel section size N.
    #[arg(long, global = true)]
    pub trunc_n: Option<usize>,
    /// Extension reach J.
    #[arg(long, global = true)]
    pub extend_j: Option<usize>,
}

/// A failed job: exit code plus diagnostic.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: String) -> Self {
        Failure { code: 1, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidGrid(_) | Error::MissingIndex(..) | Error::NotHermitian { .. } | Error::Dimension(_) => 1,
            Error::NotPd { .. }
            | Error::Infeasible(_)
            | Error::CommViolation { .. }
            | Error::StructureViolation { .. }
            | Error::NormAtLeastOne { .. } => 2,
            Error::Unstable { .. }
            | Error::NoConvergence { .. }
            | Error::IllConditioned { .. }
            | Error::SingularTk
            | Error::DegenerateDeterminant
            | Error::NotPositiveOnCircle { .. } => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl JobConfig {
    fn validate(&self) -> Result<(), Failure> {
        for (name, v) in [
            ("--tol-comm", self.tol_comm),
            ("--tol-pd", self.tol_pd),
            ("--margin", self.margin),
            ("--tol", self.tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Failure::input(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("--fft-n", Some(self.fft_n)), ("--grid-n", self.grid_n)] {
            if let Some(v) = v {
                if !v.is_power_of_two() || !(64..=4096).contains(&v) {
                    return Err(Failure::input(format!("{name} must be a power of two in 64..=4096, got {v}")));
                }
            }
        }
        if self.trunc_n == Some(0) {
            return Err(Failure::input("--trunc-n must be at least 1".into()));
        }
        Ok(())
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    cli.cfg.validate()?;
    commands::run(cli.command, &cli.cfg)
}

fn main() -> ExitCode {
    // clap's own usage-error code (2) would read as "infeasible".
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
