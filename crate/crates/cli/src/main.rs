//! `thzmec` command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thzmec::channel::{noise_power, watts_to_dbm, MMWAVE_28GHZ, MMWAVE_NOISE_DBM, THZ_WINDOWS};
use thzmec::harness::validate::run_all;
use thzmec::harness::{emit_outputs, figure, monte_carlo, run_table, Execution, Scenario, Table, FIGURES};
use thzmec::Error;

#[derive(Parser)]
#[command(name = "thzmec", version, about = "NOMA cooperative THz-SIMO MEC simulator")]
struct Cli {
    /// Run trials on one thread.
    #[arg(long, global = true)]
    serial: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo sweep over the configured user counts.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Regenerate one evaluation figure.
    Figure {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(FIGURES))]
        name: String,
        /// Base scenario; defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Overrides `run.trials`.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Run every brute-force oracle suite.
    Validate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print the THz transmission windows.
    Windows,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_NONCONVERGENCE: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => EXIT_CONFIG,
        Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        e if e.is_infeasibility() => EXIT_INFEASIBLE,
        _ => EXIT_FAILURE,
    }
}

fn write_tables(tables: &[Table], out: &std::path::Path) -> Result<(), Error> {
    for t in tables {
        let (csv, gp) = emit_outputs(t, out)?;
        println!("wrote {} and {}", csv.display(), gp.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Error> {
    let exec = if cli.serial { Execution::Serial } else { Execution::Parallel };
    match cli.command {
        Command::Run { config, out } => {
            let scenario = Scenario::from_file(&config)?;
            let points = monte_carlo(&scenario, exec)?;
            write_tables(&[run_table(&scenario, &points)], &out)?;
            let structural: Vec<_> = points
                .iter()
                .filter_map(|p| p.structural.as_ref().map(|s| (p.users, s)))
                .collect();
            for (users, why) in &structural {
                eprintln!("infeasible at {users} users: {why}");
            }
            Ok(if structural.is_empty() { 0 } else { EXIT_INFEASIBLE })
        }
        Command::Figure { name, config, out, trials } => {
            let mut base = match config {
                Some(p) => Scenario::from_file(&p)?,
                None => Scenario::default(),
            };
            if let Some(t) = trials {
                base.run.trials = t;
            }
            write_tables(&figure(&name, &base, exec)?, &out)?;
            Ok(0)
        }
        Command::Validate { seed } => {
            let checks = run_all(seed);
            for c in &checks {
                println!("{}", c.line());
            }
            Ok(if checks.iter().all(|c| c.passed) { 0 } else { EXIT_FAILURE })
        }
        Command::Windows => {
            println!("name,center_frequency_hz,bandwidth_hz,absorption_per_m,noise_dbm");
            for (n, w) in THZ_WINDOWS {
                let noise = watts_to_dbm(noise_power(w.bandwidth, 10.0)?);
                println!(
                    "{n},{},{},{},{noise:.2}",
                    w.center_frequency, w.bandwidth, w.absorption_coeff
                );
            }
            let w = MMWAVE_28GHZ;
            println!(
                "mmwave,{},{},{},{MMWAVE_NOISE_DBM:.2}",
                w.center_frequency, w.bandwidth, w.absorption_coeff
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
