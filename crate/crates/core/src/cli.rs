//! The `datatrace` command line.
//!
//! Exit codes: 0 on success, 1 when the script fails to parse or run, 2 for
//! usage errors and unreadable files.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::clock::{FixedClock, Timestamp};
use crate::dsl::parse_script;
use crate::loggers::LoggerCatalog;
use crate::runner::{LoadError, RunOptions, Runner};

pub const GRAMMAR: &str = include_str!("../../../docs/grammar.md");

#[derive(Debug, Parser)]
#[command(
    name = "datatrace",
    version,
    about = "Run data-cleaning scripts and log how the data changes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a script with its logging directives
    Run {
        script: PathBuf,
        /// Directory for default log files [default: the script's directory]
        #[arg(long)]
        log_dir: Option<PathBuf>,
        /// Print nothing but errors
        #[arg(long)]
        quiet: bool,
        /// Stamp every log entry with this time, e.g. 2020-05-08T15:24:36+02:00
        #[arg(long, value_name = "ISO8601")]
        fixed_time: Option<Timestamp>,
    },
    /// Parse a script without running it
    Check { script: PathBuf },
    /// List the available logger kinds
    Loggers,
    /// Print the script grammar
    Grammar,
}

pub fn main() -> ExitCode {
    let code = run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code)
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                2
            } else {
                let _ = write!(out, "{}", e.render());
                0
            };
            return code;
        }
    };
    match cli.command {
        Command::Run {
            script,
            log_dir,
            quiet,
            fixed_time,
        } => {
            let mut options = RunOptions {
                log_dir,
                ..RunOptions::default()
            };
            if let Some(t) = fixed_time {
                options = options.with_clock(FixedClock(t));
            }
            let mut sink = io::sink();
            let console: &mut dyn Write = if quiet { &mut sink } else { out };
            match Runner::new(options).run_file(&script, console) {
                Ok(report) => match report.error {
                    None => 0,
                    Some(e) => {
                        let _ = writeln!(err, "error: {e}");
                        1
                    }
                },
                Err(e) => load_failure(e, err),
            }
        }
        Command::Check { script } => {
            let name = script.display().to_string();
            let source = match std::fs::read_to_string(&script) {
                Ok(s) => s,
                Err(source) => {
                    return load_failure(
                        LoadError::Io {
                            path: script,
                            source,
                        },
                        err,
                    )
                }
            };
            match parse_script(&source, &name) {
                Ok(s) => {
                    let _ = writeln!(out, "{name}: {} statements", s.len());
                    0
                }
                Err(e) => load_failure(LoadError::Parse { file: name, err: e }, err),
            }
        }
        Command::Loggers => {
            for k in LoggerCatalog::default().kinds() {
                let _ = writeln!(
                    out,
                    "{:<40} {}",
                    format!("{}({})", k.name, k.signature),
                    k.description
                );
            }
            0
        }
        Command::Grammar => {
            let _ = out.write_all(GRAMMAR.as_bytes());
            0
        }
    }
}

fn load_failure(e: LoadError, err: &mut dyn Write) -> u8 {
    let _ = writeln!(err, "error: {e}");
    match e {
        LoadError::Io { .. } => 2,
        LoadError::Parse { .. } => 1,
    }
}
