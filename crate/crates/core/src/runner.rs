//! Runs a script statement by statement in a fresh environment, handling the
//! logging directives and feeding every attached logger after each statement.

use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use crate::clock::{Clock, SystemClock};
use crate::dsl::{
    exec_statement, parse_script, Args, Env, ParseError, Script, SrcRef, Statement, StatementKind,
};
use crate::loggers::{
    default_dump_target, dump_message, LogEvent, LoggerCatalog, LoggerError, LoggerRegistry,
};
use crate::table::{Frame, Value};

#[derive(Clone)]
pub struct RunOptions {
    /// Where default log files go. `None` means the script's directory.
    pub log_dir: Option<PathBuf>,
    pub clock: Arc<dyn Clock>,
    /// Dump attached loggers when a statement fails.
    pub dump_on_error: bool,
    pub catalog: LoggerCatalog,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            log_dir: None,
            clock: Arc::new(SystemClock),
            dump_on_error: true,
            catalog: LoggerCatalog::default(),
        }
    }
}

impl RunOptions {
    pub fn with_log_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.log_dir = Some(dir.into());
        self
    }

    pub fn with_clock(mut self, clock: impl Clock + 'static) -> Self {
        self.clock = Arc::new(clock);
        self
    }
}

/// The script could not be run at all.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read `{path}`: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{file}:{err}")]
    Parse { file: String, err: ParseError },
}

/// A failure while running; `srcref` is absent for failures of the final
/// dumps.
#[derive(Debug, Clone, PartialEq)]
pub struct RunError {
    pub message: String,
    pub srcref: Option<SrcRef>,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.srcref {
            Some(s) => write!(f, "{s}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DumpRecord {
    pub variable: String,
    pub kind: String,
    pub destination: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunReport {
    /// Statements completed before the run ended.
    pub statements_executed: usize,
    pub dumps: Vec<DumpRecord>,
    pub error: Option<RunError>,
}

impl RunReport {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Reads, parses and runs a script file, printing to standard output.
pub fn run_file(path: impl AsRef<Path>, options: &RunOptions) -> Result<RunReport, LoadError> {
    Runner::new(options.clone()).run_file(path, &mut io::stdout())
}

pub struct Runner {
    options: RunOptions,
}

impl Runner {
    pub fn new(options: RunOptions) -> Self {
        Runner { options }
    }

    /// Data paths in the script resolve against the script's directory.
    pub fn run_file(
        &self,
        path: impl AsRef<Path>,
        console: &mut dyn Write,
    ) -> Result<RunReport, LoadError> {
        let path = path.as_ref();
        let source = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let name = path.file_name().map_or_else(
            || path.display().to_string(),
            |n| n.to_string_lossy().into_owned(),
        );
        let base_dir = path.parent().unwrap_or(Path::new(""));
        self.run_source(&source, &name, base_dir, console)
    }

    pub fn run_source(
        &self,
        source: &str,
        file_name: &str,
        base_dir: &Path,
        console: &mut dyn Write,
    ) -> Result<RunReport, LoadError> {
        let script = parse_script(source, file_name).map_err(|err| LoadError::Parse {
            file: file_name.to_string(),
            err,
        })?;
        Ok(self.run_script(&script, base_dir, console))
    }

    pub fn run_script(
        &self,
        script: &Script,
        base_dir: &Path,
        console: &mut dyn Write,
    ) -> RunReport {
        let log_dir = self
            .options
            .log_dir
            .clone()
            .unwrap_or_else(|| base_dir.to_path_buf());
        let mut run = Run {
            options: &self.options,
            base_dir,
            log_dir,
            env: Env::new(),
            registry: LoggerRegistry::new(),
            report: RunReport::default(),
            console,
        };
        for stmt in &script.statements {
            if let Err(message) = run.statement(stmt) {
                run.report.error = Some(RunError {
                    message,
                    srcref: Some(stmt.srcref.clone()),
                });
                if self.options.dump_on_error {
                    // The statement's own error is the one worth reporting.
                    let _ = run.dump_all();
                }
                return run.report;
            }
            run.report.statements_executed += 1;
        }
        if let Err(message) = run.dump_all() {
            run.report.error = Some(RunError {
                message,
                srcref: None,
            });
        }
        run.report
    }
}

struct Run<'a> {
    options: &'a RunOptions,
    base_dir: &'a Path,
    log_dir: PathBuf,
    env: Env,
    registry: LoggerRegistry,
    report: RunReport,
    console: &'a mut dyn Write,
}

impl Run<'_> {
    fn event(&self, stmt: &Statement) -> LogEvent {
        LogEvent {
            expr_source: stmt.source.clone(),
            srcref: Some(stmt.srcref.clone()),
            timestamp: self.options.clock.now(),
        }
    }

    fn tracked_frame(&self, variable: &str) -> Result<Arc<Frame>, String> {
        match self.env.frame(variable) {
            Some(f) => Ok(f.clone()),
            None if self.env.get(variable).is_some() => {
                Err(format!("tracked variable `{variable}` is not a frame"))
            }
            None => Err(format!("unknown frame `{variable}`")),
        }
    }

    fn statement(&mut self, stmt: &Statement) -> Result<(), String> {
        match &stmt.kind {
            StatementKind::StartLog {
                variable,
                logger_kind,
                logger_args,
            } => self.start(stmt, variable, logger_kind, logger_args),
            StatementKind::StopLog {
                variable,
                logger_kind,
                dump_args,
            } => {
                let mut args = dump_args.clone();
                let dump = flag(&mut args, "dump", true)?;
                self.finish(variable, logger_kind.as_deref(), &args, dump, true)
            }
            StatementKind::DumpLog {
                variable,
                logger_kind,
                dump_args,
            } => {
                let mut args = dump_args.clone();
                let stop = flag(&mut args, "stop", false)?;
                self.finish(variable, logger_kind.as_deref(), &args, true, stop)
            }
            _ => self.execute(stmt),
        }
    }

    fn start(
        &mut self,
        stmt: &Statement,
        variable: &str,
        kind: &str,
        args: &Args,
    ) -> Result<(), String> {
        let frame = self.tracked_frame(variable)?;
        if self.registry.contains(variable, kind) {
            return Err(LoggerError::Duplicate {
                variable: variable.to_string(),
                kind: kind.to_string(),
            }
            .to_string());
        }
        let mut logger = self
            .options
            .catalog
            .build(kind, args)
            .map_err(|e| e.to_string())?;
        let target = default_dump_target(Some(variable), kind, &self.log_dir);
        logger.attach(Some(variable), &target, self.base_dir);
        logger
            .add(&self.event(stmt), &frame, &frame)
            .map_err(|e| e.to_string())?;
        self.registry
            .attach(variable, logger)
            .map_err(|e| e.to_string())
    }

    fn execute(&mut self, stmt: &Statement) -> Result<(), String> {
        let variables = self.registry.variables();
        let before: Vec<Arc<Frame>> = variables
            .iter()
            .map(|v| self.tracked_frame(v))
            .collect::<Result<_, _>>()?;
        exec_statement(stmt, &mut self.env, self.base_dir).map_err(|e| e.kind.to_string())?;
        let event = self.event(stmt);
        for (v, input) in variables.iter().zip(before) {
            let output = self.tracked_frame(v)?;
            for kind in self.registry.kinds_for(v) {
                let logger = self
                    .registry
                    .get_mut(v, &kind)
                    .expect("kind listed for variable");
                logger
                    .add(&event, &input, &output)
                    .map_err(|e| format!("{kind} logger on `{v}`: {e}"))?;
            }
        }
        Ok(())
    }

    fn finish(
        &mut self,
        variable: &str,
        kind: Option<&str>,
        args: &Args,
        dump: bool,
        stop: bool,
    ) -> Result<(), String> {
        let kinds = match kind {
            Some(k) if self.registry.contains(variable, k) => vec![k.to_string()],
            Some(k) => return Err(format!("no `{k}` logger attached to `{variable}`")),
            None => self.registry.kinds_for(variable),
        };
        if kinds.is_empty() {
            return Err(format!("no loggers attached to `{variable}`"));
        }
        if kinds.len() > 1 && args.contains("file") {
            return Err(format!(
                "`file` is ambiguous with {} loggers on `{variable}`; name one with `logger =`",
                kinds.len()
            ));
        }
        for k in kinds {
            if dump {
                self.dump_one(variable, &k, args)?;
            }
            if stop {
                let mut logger = self
                    .registry
                    .detach(variable, &k)
                    .expect("kind listed for variable");
                logger.stop();
            }
        }
        Ok(())
    }

    fn dump_one(&mut self, variable: &str, kind: &str, args: &Args) -> Result<(), String> {
        let target = default_dump_target(Some(variable), kind, &self.log_dir);
        let logger = self
            .registry
            .get_mut(variable, kind)
            .expect("caller checked");
        let report = logger
            .dump(&target, self.base_dir, args, &mut *self.console)
            .map_err(|e| format!("{kind} logger on `{variable}`: {e}"))?;
        if let Some(dest) = &report.destination {
            let _ = writeln!(self.console, "{}", dump_message(dest));
        }
        self.report.dumps.push(DumpRecord {
            variable: variable.to_string(),
            kind: kind.to_string(),
            destination: report.destination,
        });
        Ok(())
    }

    /// Dumps and stops everything still attached, in attachment order. Keeps
    /// going past failures and returns the first.
    fn dump_all(&mut self) -> Result<(), String> {
        let mut first = Ok(());
        let pairs: Vec<(String, String)> = self
            .registry
            .variables()
            .into_iter()
            .flat_map(|v| {
                self.registry
                    .kinds_for(&v)
                    .into_iter()
                    .map(move |k| (v.clone(), k))
            })
            .collect();
        for (v, k) in pairs {
            let r = self.dump_one(&v, &k, &Args::new());
            if first.is_ok() {
                first = r;
            }
            if let Some(mut logger) = self.registry.detach(&v, &k) {
                logger.stop();
            }
        }
        first
    }
}

/// Removes a boolean control argument such as `dump = FALSE`.
fn flag(args: &mut Args, name: &str, default: bool) -> Result<bool, String> {
    match args.take(name) {
        None => Ok(default),
        Some(Value::Boolean(b)) => Ok(b),
        Some(_) => Err(format!("`{name}` must be TRUE or FALSE")),
    }
}
