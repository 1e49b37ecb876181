use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use rodwheel::cli::{cmd_audit, cmd_simulate, cmd_sweep, SimulateOverrides, SWEEP_HEADER};

#[derive(Parser)]
#[command(
    name = "rodwheel",
    about = "Simulate and audit the rodwheel: a rolling disk carrying a motorized rod",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and export the trajectory CSV
    Simulate {
        /// Scenario file (TOML)
        scenario: PathBuf,
        /// Override the integration step (s)
        #[arg(long)]
        dt: Option<f64>,
        /// Override the horizon (s)
        #[arg(long)]
        duration: Option<f64>,
        /// Override the controller: none | case1 | case2
        #[arg(long)]
        controller: Option<String>,
        /// CSV output path
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep every n-th sample in the CSV
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Cross-check the dynamics against the finite-difference oracle and
    /// report energy and constraint residuals for the scenario's run
    Audit {
        /// Scenario file (TOML)
        scenario: PathBuf,
    },
    /// Re-run a scenario over a list of values for one parameter
    Sweep {
        /// Scenario file (TOML)
        scenario: PathBuf,
        /// One of: theta0 | dt | v_ref | k_p | k_d | k_theta
        #[arg(long)]
        param: String,
        /// Comma-separated list of values
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
}

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_FALL: u8 = 2;

fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Simulate {
            scenario,
            dt,
            duration,
            controller,
            out,
            stride,
        } => {
            let overrides = SimulateOverrides {
                dt,
                duration,
                controller,
                out,
                stride,
            };
            match cmd_simulate(&scenario, &overrides) {
                Ok(report) => {
                    println!("{report}");
                    if report.fell() {
                        EXIT_FALL
                    } else {
                        EXIT_OK
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_ERROR
                }
            }
        }
        Command::Audit { scenario } => match cmd_audit(&scenario) {
            Ok(report) => {
                println!("{report}");
                if report.passed() {
                    EXIT_OK
                } else {
                    EXIT_ERROR
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
        Command::Sweep {
            scenario,
            param,
            values,
        } => match cmd_sweep(&scenario, &param, &values) {
            Ok(rows) => {
                println!("{SWEEP_HEADER}");
                for row in rows {
                    println!("{row}");
                }
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
    }
}

fn main() -> ExitCode {
    match Cli::try_parse() {
        Ok(cli) => ExitCode::from(run(cli)),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            ExitCode::from(EXIT_OK)
        }
        Err(e) => {
            eprint!("{e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
