//! Command-line interface.
//!
//! Exit codes: 0 on success, 2 for configuration and usage errors, 1 for
//! failures while running.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, CliError, Options, DEFAULT_MU_VALUES};

#[derive(Debug, Parser)]
#[command(name = "fedapa", version, about = "Personalized federated learning simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment and write its metrics.
    Run(Common),
    /// Compare the post-processing ablations and strategy variants.
    Ablate {
        #[command(flatten)]
        common: Common,
        /// Average over this many consecutive seeds.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
    },
    /// Run FedAPA once per self-weight value.
    SweepMu {
        #[command(flatten)]
        common: Common,
        /// Comma-separated self-weights.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_MU_VALUES)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        seeds: u64,
    },
    /// Check a config and print it fully resolved.
    ValidateConfig(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML config file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override one config key, e.g. `--set eta=0.05`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads for local training (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl From<Common> for Options {
    fn from(c: Common) -> Self {
        Options {
            config: c.config,
            seed: c.seed,
            out: c.out,
            set: c.set,
            threads: c.threads,
        }
    }
}

/// Parse `args` (program name first) and run the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code() as u8;
            let _ = if code == 0 {
                write!(stdout, "{}", e.render())
            } else {
                write!(stderr, "{}", e.render())
            };
            return code;
        }
    };
    let result: Result<(), CliError> = match cli.command {
        Command::Run(c) => commands::cmd_run(&c.into(), stdout).map(drop),
        Command::Ablate { common, seeds } => commands::cmd_ablate(&common.into(), seeds, stdout).map(drop),
        Command::SweepMu { common, values, seeds } => {
            commands::cmd_sweep_mu(&common.into(), &values, seeds, stdout).map(drop)
        }
        Command::ValidateConfig(c) => commands::cmd_validate(&c.into(), stdout).map(drop),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> ExitCode {
    let code = run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    ExitCode::from(code)
}
