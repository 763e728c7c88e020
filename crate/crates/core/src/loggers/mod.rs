//! Loggers observe a tracked frame step by step.
//!
//! A logger receives `(meta, input, output)` after every step through
//! [`Logger::add`], writes what it collected with [`Logger::dump`], and may
//! release resources in [`Logger::stop`]. [`LoggerInstance`] wraps a logger
//! with its step counter and lifecycle state; [`LoggerRegistry`] holds at most
//! one instance per (variable, kind) pair.

mod cellwise;
mod expression;
mod filedump;
mod simple;
mod trivial;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

pub use cellwise::Cellwise;
pub use expression::ExpressionLogger;
pub use filedump::FileDump;
pub use simple::Simple;
pub use trivial::Trivial;

use crate::clock::Timestamp;
use crate::dsl::{Args, EvalError, ParseError, SrcRef};
use crate::table::{Column, CsvError, DiffError, Frame, Value};

#[derive(Debug, Error)]
pub enum LoggerError {
    #[error("logger already stopped")]
    Stopped,
    #[error("variable `{variable}` already has a `{kind}` logger")]
    Duplicate { variable: String, kind: String },
    #[error("unknown logger kind `{0}`")]
    UnknownKind(String),
    #[error("{kind}: {message}")]
    BadArgument { kind: String, message: String },
    #[error("cellwise: {0}")]
    Diff(#[from] DiffError),
    #[error("expression `{name}` failed to parse: {source}")]
    ExpressionParse { name: String, source: ParseError },
    #[error("expression `{name}`: {source}")]
    Expression { name: String, source: EvalError },
    #[error("cannot write `{path}`: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("{0}")]
    Custom(String),
}

impl LoggerError {
    pub(crate) fn bad_argument(kind: &str, message: impl Into<String>) -> Self {
        LoggerError::BadArgument {
            kind: kind.to_string(),
            message: message.into(),
        }
    }
}

/// What a logger is told about one step.
#[derive(Debug, Clone, PartialEq)]
pub struct LogMeta {
    /// Source text of the statement or chain step.
    pub expr_source: String,
    /// Absent for chained steps.
    pub srcref: Option<SrcRef>,
    /// 1-based, per logger.
    pub step: u64,
    pub timestamp: Timestamp,
}

/// The caller's half of a [`LogMeta`]; the step number comes from the
/// receiving [`LoggerInstance`].
#[derive(Debug, Clone, PartialEq)]
pub struct LogEvent {
    pub expr_source: String,
    pub srcref: Option<SrcRef>,
    pub timestamp: Timestamp,
}

/// Handed to a logger when it is attached to a variable.
#[derive(Debug, Clone, Copy)]
pub struct AttachContext<'a> {
    /// Name of the tracked variable, when known.
    pub label: Option<&'a str>,
    /// Where the log goes unless dump arguments say otherwise.
    pub default_target: &'a Path,
    /// Directory that relative paths in logger arguments resolve against.
    pub base_dir: &'a Path,
}

pub struct DumpContext<'a> {
    pub default_target: &'a Path,
    pub base_dir: &'a Path,
    /// Extra arguments from `stop_log`/`dump_log`.
    pub args: &'a Args,
    /// Standard output, or whatever the caller substitutes for it.
    pub console: &'a mut dyn Write,
}

impl DumpContext<'_> {
    /// The `file` argument resolved against the base directory, or the
    /// default target.
    pub fn file_target(&self, kind: &str) -> Result<PathBuf, LoggerError> {
        match self.args.get("file") {
            None => Ok(self.default_target.to_path_buf()),
            Some(Value::Text(f)) => Ok(resolve(self.base_dir, f)),
            Some(_) => Err(LoggerError::bad_argument(kind, "`file` must be a string")),
        }
    }
}

/// Where a dump went. `None` when the logger wrote no file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DumpReport {
    pub destination: Option<PathBuf>,
}

impl DumpReport {
    pub fn at(path: impl Into<PathBuf>) -> Self {
        DumpReport {
            destination: Some(path.into()),
        }
    }
}

pub trait Logger: Send {
    /// Registry kind, e.g. `cellwise`.
    fn kind(&self) -> &str;

    fn attach(&mut self, _ctx: &AttachContext<'_>) {}

    fn add(&mut self, meta: &LogMeta, input: &Frame, output: &Frame) -> Result<(), LoggerError>;

    fn dump(&mut self, ctx: &mut DumpContext<'_>) -> Result<DumpReport, LoggerError>;

    /// Runs once, after the final dump.
    fn stop(&mut self) {}
}

/// A logger plus its step counter and lifecycle state.
pub struct LoggerInstance {
    logger: Box<dyn Logger>,
    kind: String,
    steps: u64,
    stopped: bool,
    label: Option<String>,
}

impl std::fmt::Debug for LoggerInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LoggerInstance")
            .field("kind", &self.kind)
            .field("steps", &self.steps)
            .field("stopped", &self.stopped)
            .field("label", &self.label)
            .finish()
    }
}

impl LoggerInstance {
    pub fn new(logger: impl Logger + 'static) -> Self {
        Self::from_box(Box::new(logger))
    }

    pub fn from_box(logger: Box<dyn Logger>) -> Self {
        LoggerInstance {
            kind: logger.kind().to_string(),
            logger,
            steps: 0,
            stopped: false,
            label: None,
        }
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    /// Number of `add` calls so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn is_stopped(&self) -> bool {
        self.stopped
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn attach(&mut self, label: Option<&str>, default_target: &Path, base_dir: &Path) {
        self.label = label.map(str::to_string);
        self.logger.attach(&AttachContext {
            label,
            default_target,
            base_dir,
        });
    }

    /// Feeds one step to the logger, numbering it one past the previous step.
    pub fn add(
        &mut self,
        event: &LogEvent,
        input: &Frame,
        output: &Frame,
    ) -> Result<(), LoggerError> {
        if self.stopped {
            return Err(LoggerError::Stopped);
        }
        let meta = LogMeta {
            expr_source: event.expr_source.clone(),
            srcref: event.srcref.clone(),
            step: self.steps + 1,
            timestamp: event.timestamp,
        };
        self.logger.add(&meta, input, output)?;
        self.steps += 1;
        Ok(())
    }

    pub fn dump(
        &mut self,
        default_target: &Path,
        base_dir: &Path,
        args: &Args,
        console: &mut dyn Write,
    ) -> Result<DumpReport, LoggerError> {
        self.logger.dump(&mut DumpContext {
            default_target,
            base_dir,
            args,
            console,
        })
    }

    /// Marks the instance stopped and runs the logger's stop hook. Calling it
    /// again does nothing.
    pub fn stop(&mut self) {
        if !self.stopped {
            self.stopped = true;
            self.logger.stop();
        }
    }
}

/// At most one logger per (variable, kind), kept in attachment order.
#[derive(Debug, Default)]
pub struct LoggerRegistry {
    entries: IndexMap<(String, String), LoggerInstance>,
}

impl LoggerRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn attach(&mut self, variable: &str, logger: LoggerInstance) -> Result<(), LoggerError> {
        let key = (variable.to_string(), logger.kind().to_string());
        if self.entries.contains_key(&key) {
            return Err(LoggerError::Duplicate {
                variable: key.0,
                kind: key.1,
            });
        }
        self.entries.insert(key, logger);
        Ok(())
    }

    pub fn contains(&self, variable: &str, kind: &str) -> bool {
        self.entries
            .contains_key(&(variable.to_string(), kind.to_string()))
    }

    pub fn get_mut(&mut self, variable: &str, kind: &str) -> Option<&mut LoggerInstance> {
        self.entries
            .get_mut(&(variable.to_string(), kind.to_string()))
    }

    pub fn detach(&mut self, variable: &str, kind: &str) -> Option<LoggerInstance> {
        self.entries
            .shift_remove(&(variable.to_string(), kind.to_string()))
    }

    /// Kinds attached to `variable`, in attachment order.
    pub fn kinds_for(&self, variable: &str) -> Vec<String> {
        self.entries
            .keys()
            .filter(|(v, _)| v == variable)
            .map(|(_, k)| k.clone())
            .collect()
    }

    /// Tracked variables, each once, in order of first attachment.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for (v, _) in self.entries.keys() {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&str, &mut LoggerInstance)> {
        self.entries.iter_mut().map(|((v, _), l)| (v.as_str(), l))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Removes and returns every entry, in attachment order.
    pub fn drain(&mut self) -> Vec<(String, LoggerInstance)> {
        self.entries.drain(..).map(|((v, _), l)| (v, l)).collect()
    }
}

pub type LoggerFactory = Arc<dyn Fn(&Args) -> Result<Box<dyn Logger>, LoggerError> + Send + Sync>;

/// A constructible logger kind.
#[derive(Clone)]
pub struct LoggerKind {
    pub name: String,
    /// Constructor arguments as shown to users, e.g. `key = "<column>"`.
    pub signature: String,
    pub description: String,
    factory: LoggerFactory,
}

/// Logger kinds that scripts may name in `start_log`.
#[derive(Clone)]
pub struct LoggerCatalog {
    kinds: IndexMap<String, LoggerKind>,
}

impl Default for LoggerCatalog {
    fn default() -> Self {
        let mut c = LoggerCatalog {
            kinds: IndexMap::new(),
        };
        c.register("simple", "", "record whether anything changed", |a| {
            Ok(Box::new(Simple::from_args(a)?))
        });
        c.register(
            "cellwise",
            "key = \"<column>\"",
            "record cell-by-cell changes",
            |a| Ok(Box::new(Cellwise::from_args(a)?)),
        );
        c.register(
            "expression",
            "<name> = \"<expression>\", ...",
            "record the result of summary expressions after each step",
            |a| Ok(Box::new(ExpressionLogger::from_args(a)?)),
        );
        c.register(
            "filedump",
            "[dir = \"<directory>\"]",
            "write the data to a numbered file after each step",
            |a| Ok(Box::new(FileDump::from_args(a)?)),
        );
        c.register(
            "trivial",
            "",
            "report whether the data changed at all",
            |a| Ok(Box::new(Trivial::from_args(a)?)),
        );
        c
    }
}

impl LoggerCatalog {
    /// Adds or replaces a kind. The factory's loggers must report `name` as
    /// their kind.
    pub fn register<F>(&mut self, name: &str, signature: &str, description: &str, factory: F)
    where
        F: Fn(&Args) -> Result<Box<dyn Logger>, LoggerError> + Send + Sync + 'static,
    {
        self.kinds.insert(
            name.to_string(),
            LoggerKind {
                name: name.to_string(),
                signature: signature.to_string(),
                description: description.to_string(),
                factory: Arc::new(factory),
            },
        );
    }

    pub fn build(&self, kind: &str, args: &Args) -> Result<LoggerInstance, LoggerError> {
        let k = self
            .kinds
            .get(kind)
            .ok_or_else(|| LoggerError::UnknownKind(kind.to_string()))?;
        let logger = (k.factory)(args)?;
        if logger.kind() != kind {
            return Err(LoggerError::Custom(format!(
                "factory for `{kind}` built a `{}` logger",
                logger.kind()
            )));
        }
        Ok(LoggerInstance::from_box(logger))
    }

    pub fn kinds(&self) -> impl Iterator<Item = &LoggerKind> {
        self.kinds.values()
    }
}

/// Default dump destination of a logger.
///
/// With a known variable name: `<dir>/<variable>_<kind>.csv`, or the
/// directory `<dir>/<variable>_filedump` for file dumps. Without one (chained
/// use): `<dir>/<kind>.csv`, or `<dir>/filedump`.
pub fn default_dump_target(variable: Option<&str>, kind: &str, dir: &Path) -> PathBuf {
    let stem = match variable {
        Some(v) => format!("{v}_{kind}"),
        None => kind.to_string(),
    };
    if kind == "filedump" {
        dir.join(stem)
    } else {
        dir.join(format!("{stem}.csv"))
    }
}

/// The line printed for each dump that produced a file.
pub fn dump_message(path: &Path) -> String {
    format!("Dumped a log at {}", path.display())
}

pub(crate) fn resolve(base_dir: &Path, path: &str) -> PathBuf {
    let p = Path::new(path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base_dir.join(p)
    }
}

/// The `step,time,srcref,expression` columns shared by the CSV logs.
pub(crate) fn meta_columns<'a>(metas: impl Iterator<Item = &'a LogMeta> + Clone) -> Vec<Column> {
    vec![
        Column::new(
            "step",
            metas
                .clone()
                .map(|m| Value::Number(m.step as f64))
                .collect(),
        ),
        Column::new(
            "time",
            metas
                .clone()
                .map(|m| Value::Text(m.timestamp.to_string()))
                .collect(),
        ),
        Column::new(
            "srcref",
            metas
                .clone()
                .map(|m| {
                    m.srcref
                        .as_ref()
                        .map_or(Value::Missing, |s| Value::Text(s.to_string()))
                })
                .collect(),
        ),
        Column::new(
            "expression",
            metas.map(|m| Value::Text(m.expr_source.clone())).collect(),
        ),
    ]
}

pub(crate) const META_COLUMNS: [&str; 4] = ["step", "time", "srcref", "expression"];

pub(crate) fn write_log(frame: &Frame, path: &Path) -> Result<DumpReport, LoggerError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| LoggerError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    crate::table::write_csv(frame, path)?;
    Ok(DumpReport::at(path))
}
