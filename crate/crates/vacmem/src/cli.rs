//! Command-line surface.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use vacmem_core::fock_oracle::{run_suite, DEFAULT_DIM, DEFAULT_THETA_MAX};

use crate::config::{load_scenario, ScenarioConfig};
use crate::emit::sig9;
use crate::emit::{emit, Format};
use crate::scenario::{lifetime_table, run_scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vacmem", version, about = "Dissipative condensate memory simulator")]
pub struct Cli {
    /// Suppress progress output.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Replace every perturbation seed in the scenario.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and write its time series and tables.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Print the lifetime table (k, domain size, tau) of a scenario.
    Lifetimes { config: PathBuf },
    /// Check the condensate formulas against the truncated Fock oracle.
    VerifyOracle {
        #[arg(long, default_value_t = DEFAULT_DIM)]
        dim: usize,
        #[arg(long, default_value_t = DEFAULT_THETA_MAX)]
        theta_max: f64,
    },
}

fn load(path: &PathBuf, seed: Option<u64>) -> Result<ScenarioConfig, i32> {
    match load_scenario(path) {
        Ok(mut c) => {
            if let Some(s) = seed {
                c.override_seeds(s);
            }
            Ok(c)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(EXIT_INVALID)
        }
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Run { config, out, format } => {
            let config = match load(&config, cli.seed) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let results = match run_scenario(&config) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_RUNTIME;
                }
            };
            match emit(&results, format, &out) {
                Ok(paths) => {
                    if !cli.quiet {
                        for p in paths {
                            let _ = writeln!(stdout, "wrote {}", p.display());
                        }
                    }
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: writing {}: {e}", out.display());
                    EXIT_RUNTIME
                }
            }
        }
        Command::Lifetimes { config } => {
            let config = match load(&config, cli.seed) {
                Ok(c) => c,
                Err(code) => return code,
            };
            match lifetime_table(&config) {
                Ok(rows) => {
                    let _ = writeln!(stdout, "k,domain_size,tau");
                    for r in rows {
                        let tau = r.tau.map_or_else(|| "inf".into(), sig9);
                        let _ = writeln!(stdout, "{},{},{tau}", sig9(r.k), sig9(r.domain_size));
                    }
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_RUNTIME
                }
            }
        }
        Command::VerifyOracle { dim, theta_max } => {
            if dim < 2 || !(theta_max > 0.0) {
                eprintln!("error: --dim must be >= 2 and --theta-max > 0");
                return EXIT_INVALID;
            }
            let report = match run_suite(dim, theta_max) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_RUNTIME;
                }
            };
            for c in &report.checks {
                if !cli.quiet || !c.passed() {
                    let verdict = if c.passed() { "PASS" } else { "FAIL" };
                    let _ = writeln!(stdout, "{verdict} {} error={:e} tol={:e}", c.name, c.error, c.tolerance);
                }
            }
            let failed = report.checks.iter().filter(|c| !c.passed()).count();
            let _ = writeln!(stdout, "{} checks, {failed} failed", report.checks.len());
            if failed == 0 {
                EXIT_OK
            } else {
                EXIT_RUNTIME
            }
        }
    }
}
