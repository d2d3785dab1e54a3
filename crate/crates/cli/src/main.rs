//! Command-line front end: solve problems, run identity suites, compare
//! against oracles, and emit CSV/JSON artifacts. Exit status is 0 iff
//! every check in the invoked suite passed its tolerance.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{FileConfig, RunConfig};

#[derive(Parser)]
#[command(
    name = "tricomi",
    about = "Integral-transform toolkit for the generalized Tricomi equation u_tt - t^ell A u = f",
    version
)]
struct Cli {
    /// JSON config file; command-line flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Equation exponent ell (> -2)
    #[arg(long, global = true, allow_negative_numbers = true)]
    ell: Option<f64>,

    /// Problem preset: separable-k1, separable-k2, constant
    #[arg(long, global = true)]
    preset: Option<String>,

    /// Output directory (default: $TRICOMI_OUT_DIR or ./tricomi-out)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Gauss nodes per quadrature panel
    #[arg(long, global = true)]
    nodes: Option<usize>,

    /// Primary tolerance of the invoked suite
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Grid as nx,nt
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<Grid>,

    /// Seed for randomized sample lattices
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Final time for solve/compare runs
    #[arg(long, global = true, allow_negative_numbers = true)]
    t: Option<f64>,

    /// Domain half-width parameter for the domains command
    #[arg(long, global = true, allow_negative_numbers = true)]
    x0: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug)]
struct Grid(usize, usize);

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("grid must be nx,nt".into());
    }
    let nx = parts[0].trim().parse().map_err(|e| format!("bad nx: {e}"))?;
    let nt = parts[1].trim().parse().map_err(|e| format!("bad nt: {e}"))?;
    Ok(Grid(nx, nt))
}

#[derive(Subcommand)]
enum Command {
    /// Solve a preset problem and write the solution CSV plus a summary
    /// with the ODE-oracle comparison
    Solve,
    /// Verify the kernel PDE E_tt = t^ell E_rr on a point lattice
    KernelCheck,
    /// Verify the derivative and coefficient identities at random points
    Idcheck,
    /// Verify the K0/K1 initial values and the homogeneous Cauchy solver
    K0k1,
    /// Cross-validate the transform against the finite-difference solver
    CompareFd,
    /// Run the appendix integral identity and scaling-law suites
    Appendix,
    /// Write the domain and phi-image boundary tables
    Domains,
}

fn merged_config(cli: &Cli) -> Result<RunConfig> {
    let file = match &cli.config {
        Some(path) => Some(config::load_file(path)?),
        None => None,
    };
    let flags = FileConfig {
        ell: cli.ell,
        preset: cli.preset.clone(),
        nodes: cli.nodes,
        tol: cli.tol,
        grid: cli.grid.map(|g| [g.0, g.1]),
        out: cli.out.clone(),
        seed: cli.seed,
        x0: cli.x0,
        t: cli.t,
    };
    Ok(RunConfig::merge(file, flags))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match merged_config(&cli) {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("error: {err:#}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Solve => commands::solve(&cfg),
        Command::KernelCheck => commands::kernel_check(&cfg),
        Command::Idcheck => commands::idcheck(&cfg),
        Command::K0k1 => commands::k0k1(&cfg),
        Command::CompareFd => commands::compare_fd(&cfg),
        Command::Appendix => commands::appendix(&cfg),
        Command::Domains => commands::domains(&cfg),
    };
    match result {
        Ok(report) => {
            // machine-readable outcome on stdout
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serialization")
            );
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
