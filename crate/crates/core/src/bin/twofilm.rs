//! Command-line front end: `run`, `sweep` and `check`.
//!
//! Exit codes: 0 success, 1 invalid input, 2 runtime abort or I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use twofilm::{parse_config, run_sweep, run_to_dir, Error, RunConfig, SweepAxis, SweepOptions};

#[derive(Parser)]
#[command(name = "twofilm", version, about = "Two-film porous medium simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write diagnostics and snapshots.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Run one simulation per value of a parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// epsilon, n_cells, R or R_mu
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated values, e.g. 0.1,0.05,0.025
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Maximum number of runs executing at once.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
    },
    /// Parse and validate a config without running it.
    Check {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    config: PathBuf,
    /// Overrides `output_dir` from the config.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
}

enum Failure {
    Invalid(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::PositivityFailure { .. } | Error::ClampBudgetExceeded { .. } | Error::Io { .. } | Error::ThreadPool(_) => {
                Failure::Runtime(e.to_string())
            }
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

fn load(common: &Common) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", common.config.display())))?;
    let mut config =
        parse_config(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", common.config.display())))?;
    if let Some(dir) = &common.output_dir {
        config.output_dir = dir.clone();
    }
    Ok(config)
}

fn say(quiet: bool, msg: impl AsRef<str>) {
    if !quiet {
        println!("{}", msg.as_ref());
    }
}

fn run(common: &Common) -> Result<(), Failure> {
    let config = load(common)?;
    let out = run_to_dir(&config)?;
    let last = out.series.last().expect("a run always records its final sample");
    say(
        common.quiet,
        format!(
            "{}: t = {} after {} steps, E1 = {:.6e}, E2 = {:.6e}, dist2 = {:.3e}",
            config.output_dir.display(),
            last.time,
            out.steps,
            last.e1,
            last.e2,
            last.dist2()
        ),
    );
    Ok(())
}

fn sweep(common: &Common, axis: SweepAxis, values: &[f64], jobs: usize) -> Result<(), Failure> {
    let config = load(common)?;
    let options = SweepOptions {
        jobs,
        write_files: true,
    };
    let summary = run_sweep(&config, axis, values, &options)?;
    let summary_path = Path::new(&config.output_dir).join(format!("sweep_{}.csv", axis.name()));
    let failed: Vec<_> = summary.rows.iter().filter(|r| !r.succeeded()).collect();
    for r in &failed {
        eprintln!("{} = {}: {}", axis.name(), r.value, r.error.as_deref().unwrap_or_default());
    }
    say(
        common.quiet,
        format!(
            "{} of {} runs succeeded; summary in {}",
            summary.rows.len() - failed.len(),
            summary.rows.len(),
            summary_path.display()
        ),
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Runtime(format!("{} sweep runs failed", failed.len())))
    }
}

fn check(common: &Common) -> Result<(), Failure> {
    let config = load(common)?;
    let grid = config.grid()?;
    twofilm::initial::build_initial(&config.initial, &grid, config.seed)?;
    say(
        common.quiet,
        format!(
            "ok: {} mode, {} cells, t_end = {}",
            config.mode, config.n_cells, config.t_end
        ),
    );
    Ok(())
}

fn main() -> ExitCode {
    // clap would exit with 2 on bad flags, which here means a runtime abort.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Run { common } => run(common),
        Command::Sweep {
            common,
            axis,
            values,
            jobs,
        } => sweep(common, *axis, values, *jobs as usize),
        Command::Check { common } => check(common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
