//! `fg`: verification suites, orbit dumps, periodic tables, and the sphere simulation.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "fg", version, about = "Finite Gauss map toolkit")]
struct Cli {
    /// Print a JSON report instead of the human summary.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transfer, telescoping, preimage-measure and conjugacy checks.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Iterate the branch map and dump the orbit as CSV.
    Orbit {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        t0: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Use coordinates on [0, tan(pi/n)].
        #[arg(long)]
        oriented: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Symbolic expansion of a point and its cylinder interval.
    Encode {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        t0: f64,
        #[arg(long, default_value_t = 20)]
        digits: usize,
    },
    /// Periodic orbits by branch word.
    Periodic {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        #[arg(long)]
        oriented: bool,
        /// Integer certificates; needs --n 4 --oriented.
        #[arg(long)]
        exact: bool,
    },
    /// Invariant-density residuals of the triangle family T_a.
    Triangle {
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Histogram of the tetrahedral sphere map.
    Sphere {
        #[arg(long, default_value_t = 1_000_000)]
        iterations: u64,
        #[arg(long, default_value_t = 400)]
        bins: usize,
        #[arg(long, default_value_t = 1000)]
        burn_in: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Density samples in both coordinates, for plotting.
    Density {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let result = match cli.command {
        Command::Verify { n, samples, tol, seed } => commands::verify(n, samples, tol, seed),
        Command::Orbit {
            n,
            t0,
            steps,
            oriented,
            out,
        } => commands::orbit(n, t0, steps, oriented, out.as_deref(), json),
        Command::Encode { n, t0, digits } => commands::encode(n, t0, digits),
        Command::Periodic {
            n,
            max_len,
            oriented,
            exact,
        } => commands::periodic(n, max_len, oriented, exact),
        Command::Triangle { a, samples, seed } => commands::triangle(a, samples, seed),
        Command::Sphere {
            iterations,
            bins,
            burn_in,
            seed,
            workers,
            out,
        } => commands::sphere(iterations, bins, burn_in, seed, workers, out.as_deref(), json),
        Command::Density { n, grid, out } => commands::density(n, grid, out.as_deref(), json),
    };
    match result {
        Ok(run) => {
            if json {
                println!("{}", run.report.to_json());
            } else if run.csv_on_stdout {
                for line in run.summary.iter().chain(&run.report.check_lines()) {
                    eprintln!("{line}");
                }
            } else {
                for line in run.summary.iter().chain(&run.report.check_lines()) {
                    println!("{line}");
                }
            }
            if run.report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("fg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
