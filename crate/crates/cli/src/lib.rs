//! The `fbe` command line: analytic tables, single simulations, sweeps and
//! built-in presets.

mod commands;
mod error;

use std::ffi::OsString;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fbe_core::experiments::Preset;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "fbe", version, about = "FBE channel access for low-latency traffic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print p_c, P_trans and P_failure for a scenario file.
    Analytic(Common),
    /// Simulate one scenario and compare it with the analysis.
    Simulate(Common),
    /// Vary one parameter of a scenario file.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        /// Name of the output subdirectory and file prefix.
        #[arg(long, default_value = "sweep")]
        tag: String,
    },
    /// Run one of the built-in experiment presets.
    Reproduce {
        preset: Preset,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Axis {
    Q,
    N,
    P0,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Frames per simulation run.
    #[arg(long)]
    frames: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<u32>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// No progress messages.
    #[arg(long)]
    quiet: bool,
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Analytic(c) => commands::analytic(&c, out),
        Command::Simulate(c) => commands::simulate(&c, out),
        Command::Sweep {
            common,
            axis,
            values,
            tag,
        } => commands::sweep(&common, axis, &values, &tag, out),
        Command::Reproduce { preset, common } => commands::reproduce(preset, &common, out),
    }
}

/// Run one `fbe` invocation. `args` includes the program name. Tables go to
/// `out`, progress and errors to stderr. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match panic::catch_unwind(AssertUnwindSafe(|| dispatch(cli, out))) {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("fbe: {e}");
            e.code()
        }
        Err(_) => 3,
    }
}
