//! `posetsearch`: generate instances, run searches, fit scaling exponents
//! and analyze posets.

mod analyze;
mod error;
mod gen;
mod run;
mod scale;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "posetsearch", version, about = "Search of partially ordered sets")]
struct Cli {
    /// Base seed; trial `i` uses stream `i` of this seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1)]
    trials: u64,
    /// Output file (or directory, for `gen`). Defaults to stdout or `.`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Cap on the oracle queries of a single trial.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write instance files.
    Gen(gen::GenArgs),
    /// Run an algorithm on an instance, one JSON record per trial.
    Run(run::RunArgs),
    /// Mean query counts over a geometric size range, with a log-log fit.
    Scale(scale::ScaleArgs),
    /// Structural report of a poset.
    Analyze(analyze::AnalyzeArgs),
}

/// Shared global flags.
#[derive(Clone, Debug)]
pub struct Globals {
    pub seed: u64,
    pub trials: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub budget: Option<u64>,
}

impl Globals {
    /// Writes `text` to `--out`, or stdout.
    pub fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let globals = Globals {
        seed: cli.seed,
        trials: cli.trials,
        out: cli.out,
        format: cli.format,
        budget: cli.budget,
    };
    match cli.command {
        Command::Gen(args) => gen::cmd_gen(&args, &globals),
        Command::Run(args) => run::cmd_run(&args, &globals),
        Command::Scale(args) => scale::cmd_scale(&args, &globals),
        Command::Analyze(args) => analyze::cmd_analyze(&args, &globals),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("posetsearch: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
