//! `codearena` command-line interface.
//!
//! Exit codes: 0 on success, 2 for usage and data errors, 3 for
//! infrastructure failures.

mod commands;
mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::analyze::METRICS;
pub use table::Table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFRA: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, configuration or input data.
    Usage(String),
    /// The machine failed: I/O, subprocess or arena crashes.
    Infra(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Infra(_) => EXIT_INFRA,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Infra(m) => m,
        }
    }
}

/// Where command output goes; warnings are kept apart from results.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

impl Io<'_> {
    pub(crate) fn print(&mut self, text: &str) -> Result<(), CliError> {
        self.out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Infra(format!("writing output: {e}")))
    }

    pub(crate) fn warn(&mut self, text: &str) {
        let _ = writeln!(self.err, "warning: {text}");
    }
}

#[derive(Debug, Parser)]
#[command(name = "codearena", version, about = "Run code-arena tournaments and rate the players")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a tournament described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Timestamp embedded in the tournament id (yymmddHHMMSS); the
        /// current UTC time by default.
        #[arg(long)]
        timestamp: Option<String>,
    },
    /// Win rates and Elo ratings over one or more results directories.
    Leaderboard(commands::leaderboard::Args),
    /// Dynamics and hygiene metrics for a results directory.
    Analyze(commands::analyze::Args),
    /// Render a simulation log as text.
    Replay { file: PathBuf },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = io.err.write_all(text.as_bytes());
            } else {
                let _ = io.out.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            timestamp,
        } => commands::run::run(&config, &out, seed, timestamp, io),
        Command::Leaderboard(args) => commands::leaderboard::run(&args, io),
        Command::Analyze(args) => commands::analyze::run(&args, io),
        Command::Replay { file } => commands::replay::run(&file, io),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(io.err, "error: {}", e.message());
            e.exit_code()
        }
    }
}
