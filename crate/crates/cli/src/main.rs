//! Command-line front end: spectrum sweeps, cross-method verification,
//! reflection-zero analysis, and canned figure datasets.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/config error,
//! 3 numerical failure.

mod config;
mod figures;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crw_router::oracle::{verify_against_analytic, VerificationOutcome, DEFAULT_TRUNCATION};
use crw_router::spectra::{find_reflection_zeros, sweep, GridSpec, Method};
use crw_router::Error as CoreError;

use config::ConfigDocument;

/// A CLI failure carrying its process exit code.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: String) -> Self {
        Self { code, message }
    }

    pub fn usage(message: String) -> Self {
        Self::new(2, message)
    }

    pub fn numerical(message: String) -> Self {
        Self::new(3, message)
    }

    pub fn verification(message: String) -> Self {
        Self::new(1, message)
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = exit_code_for(&e);
        Self::new(code, e.to_string())
    }
}

fn exit_code_for(e: &CoreError) -> u8 {
    match e {
        CoreError::InvalidConfig(_)
        | CoreError::InvalidGrid(_)
        | CoreError::BandEdgeWavenumber { .. }
        | CoreError::BandEdgeEnergy { .. }
        | CoreError::AnalyticAssumption(_)
        | CoreError::NoClosedForm(_)
        | CoreError::TruncationTooSmall { .. } => 2,
        CoreError::SweepPoint { source, .. } => exit_code_for(source),
        _ => 3,
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Analytic,
    Oracle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Analytic => Method::Analytic,
            MethodArg::Oracle => Method::Oracle,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(name = "crw-router", version, about = "Single-photon router simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep scattering rates over a wavenumber grid.
    Spectrum {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        #[arg(long, default_value_t = GridSpec::default().k_min)]
        k_min: f64,
        #[arg(long, default_value_t = GridSpec::default().k_max)]
        k_max: f64,
        #[arg(long, default_value_t = GridSpec::default().points)]
        points: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Output file; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Cross-check the closed forms against the truncated-lattice solver.
    Verify {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        /// Maximum tolerated componentwise amplitude deviation.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Locate reflection zeros of the offset-coupling router and compare them
    /// with the phase-law prediction k = n*pi/(l-1).
    Zeros {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        /// Coupling site l of the input waveguide.
        #[arg(long)]
        site: usize,
    },
    /// Write the dataset behind a named figure panel.
    Figure {
        #[arg(long)]
        name: String,
        #[arg(long, value_name = "DIR", default_value = ".")]
        out_dir: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum {
            config,
            k_min,
            k_max,
            points,
            method,
            format,
            out,
        } => {
            let doc = ConfigDocument::load(&config)?;
            let cfg = doc.to_router()?;
            let grid = GridSpec::new(k_min, k_max, points)?;
            let spectrum = sweep(&cfg, &grid, method.into())?;
            let hash = doc.hash();
            let sink: Box<dyn Write> = match out {
                Some(path) => Box::new(BufWriter::new(File::create(&path).map_err(|e| {
                    CliError::usage(format!("cannot create {}: {e}", path.display()))
                })?)),
                None => Box::new(io::stdout().lock()),
            };
            match format {
                FormatArg::Csv => output::write_csv(sink, &spectrum, &hash),
                FormatArg::Json => output::write_json(sink, &spectrum, &hash),
            }
        }
        Command::Verify { config, tol } => {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(CliError::usage(format!(
                    "tolerance must be positive, got {tol}"
                )));
            }
            let cfg = ConfigDocument::load(&config)?.to_router()?;
            let grid = GridSpec::default();
            let outcome =
                verify_against_analytic(&cfg, &grid.wavenumbers(), DEFAULT_TRUNCATION)?;
            match outcome {
                VerificationOutcome::Compared(report) => {
                    println!(
                        "compared closed forms against the lattice solver on {} points",
                        grid.points
                    );
                    println!(
                        "max amplitude deviation {:.3e} at k = {:.6}",
                        report.max_amplitude_deviation, report.worst_k
                    );
                    println!(
                        "max flux residual: analytic {:.3e}, lattice {:.3e}",
                        report.max_flux_residual_analytic, report.max_flux_residual_oracle
                    );
                    if report.max_amplitude_deviation > tol {
                        return Err(CliError::verification(format!(
                            "deviation {:.3e} exceeds tolerance {tol:.3e}",
                            report.max_amplitude_deviation
                        )));
                    }
                }
                VerificationOutcome::OracleOnly { max_flux_residual } => {
                    println!(
                        "no closed form covers this config; lattice self-check only \
                         (max flux residual {max_flux_residual:.3e})"
                    );
                    if max_flux_residual > tol {
                        return Err(CliError::verification(format!(
                            "flux residual {max_flux_residual:.3e} exceeds tolerance {tol:.3e}"
                        )));
                    }
                }
            }
            println!("verification passed (tol {tol:.3e})");
            Ok(())
        }
        Command::Zeros { config, site } => {
            let cfg = ConfigDocument::load(&config)?.to_router()?;
            let report = find_reflection_zeros(&cfg, site, &GridSpec::default())?;
            if report.global_perfect_transfer {
                println!("site 1: R vanishes over the whole band (no isolated zeros)");
                return Ok(());
            }
            println!("n,k_predicted,k_found,deviation,R_at_zero");
            for z in &report.zeros {
                println!(
                    "{},{:.16e},{:.16e},{:.3e},{:.3e}",
                    z.n, z.k_predicted, z.k_found, z.deviation, z.reflection_at_zero
                );
            }
            Ok(())
        }
        Command::Figure { name, out_dir } => figures::render(&name, &out_dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
