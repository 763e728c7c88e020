//! Fluent tracking inside a program: loggers travel with the frame through a
//! chain of steps.
//!
//! ```
//! use datatrace::chain::{Step, Tracked};
//! use datatrace::loggers::Cellwise;
//! use datatrace::table::parse_csv;
//!
//! let spm = parse_csv("id,turnover,total.rev\n\"SPM03\",6886,6919\n").unwrap();
//! let tracked = Tracked::new(spm)
//!     .track(Cellwise::new("id"))
//!     .unwrap()
//!     .then(Step::transform("transform(ratio = turnover / total.rev)").unwrap())
//!     .unwrap();
//! assert_eq!(tracked.steps("cellwise"), Some(1));
//! ```

use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

use crate::clock::{Clock, SystemClock};
use crate::dsl::{
    apply_transform, parse_transform_step, Args, Env, ExecErrorKind, Expr, ParseError,
};
use crate::loggers::{
    default_dump_target, dump_message, DumpReport, LogEvent, Logger, LoggerError, LoggerInstance,
};
use crate::table::Frame;

/// Logged as the expression of a function step without a label.
pub const ANONYMOUS_STEP: &str = "<anonymous step>";

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("no loggers attached")]
    NoLoggers,
    #[error("a `{0}` logger is already attached")]
    Duplicate(String),
    #[error("`file` is ambiguous with {0} loggers attached")]
    AmbiguousFile(usize),
    #[error("step `{label}` failed: {message}")]
    Step { label: String, message: String },
    #[error("{kind} logger: {source}")]
    Logger { kind: String, source: LoggerError },
}

type StepFn = Box<dyn FnOnce(&Frame) -> Result<Frame, String>>;

/// One transformation in a chain.
pub enum Step {
    Transform {
        source: String,
        assignments: Vec<(String, Expr)>,
    },
    Function {
        label: Option<String>,
        f: StepFn,
    },
}

impl fmt::Debug for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Step").field(&self.label()).finish()
    }
}

impl Step {
    /// Parses `transform(col = expr, ...)`; the text becomes the logged
    /// expression.
    pub fn transform(source: &str) -> Result<Step, ParseError> {
        Ok(Step::Transform {
            assignments: parse_transform_step(source)?,
            source: source.trim().to_string(),
        })
    }

    pub fn function<F>(label: impl Into<String>, f: F) -> Step
    where
        F: FnOnce(&Frame) -> Result<Frame, String> + 'static,
    {
        Step::Function {
            label: Some(label.into()),
            f: Box::new(f),
        }
    }

    pub fn anonymous<F>(f: F) -> Step
    where
        F: FnOnce(&Frame) -> Result<Frame, String> + 'static,
    {
        Step::Function {
            label: None,
            f: Box::new(f),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Step::Transform { source, .. } => source,
            Step::Function { label, .. } => label.as_deref().unwrap_or(ANONYMOUS_STEP),
        }
    }

    fn run(self, frame: &Frame) -> Result<Frame, String> {
        match self {
            Step::Transform { assignments, .. } => {
                apply_transform(frame, &assignments, &Env::new())
                    .map_err(|e: ExecErrorKind| e.to_string())
            }
            Step::Function { f, .. } => f(frame),
        }
    }
}

/// A frame together with the loggers observing it.
pub struct Tracked {
    frame: Frame,
    loggers: Vec<LoggerInstance>,
    dump_dir: PathBuf,
    clock: Arc<dyn Clock>,
}

impl fmt::Debug for Tracked {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tracked")
            .field("frame", &self.frame)
            .field("loggers", &self.loggers)
            .field("dump_dir", &self.dump_dir)
            .finish()
    }
}

/// Starts tracking `frame` with one logger.
pub fn track(frame: Frame, logger: impl Logger + 'static) -> Tracked {
    Tracked::new(frame)
        .track(logger)
        .expect("a fresh frame has no loggers")
}

impl Tracked {
    /// A frame with no loggers yet. Logs go to the working directory.
    pub fn new(frame: Frame) -> Self {
        Tracked {
            frame,
            loggers: Vec::new(),
            dump_dir: PathBuf::new(),
            clock: Arc::new(SystemClock),
        }
    }

    pub fn with_clock(mut self, clock: impl Clock + 'static) -> Self {
        self.clock = Arc::new(clock);
        self
    }

    /// Directory for default log targets. Set it before attaching loggers.
    pub fn with_dump_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.dump_dir = dir.into();
        self
    }

    pub fn track(self, logger: impl Logger + 'static) -> Result<Self, ChainError> {
        self.track_instance(LoggerInstance::new(logger))
    }

    /// Attaches a logger. No step is recorded until the first `then`.
    pub fn track_instance(mut self, mut logger: LoggerInstance) -> Result<Self, ChainError> {
        if self.loggers.iter().any(|l| l.kind() == logger.kind()) {
            return Err(ChainError::Duplicate(logger.kind().to_string()));
        }
        let target = default_dump_target(None, logger.kind(), &self.dump_dir);
        logger.attach(None, &target, &self.dump_dir);
        self.loggers.push(logger);
        Ok(self)
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn kinds(&self) -> Vec<&str> {
        self.loggers.iter().map(|l| l.kind()).collect()
    }

    /// Steps recorded by the logger of this kind.
    pub fn steps(&self, kind: &str) -> Option<u64> {
        self.loggers
            .iter()
            .find(|l| l.kind() == kind)
            .map(|l| l.steps())
    }

    pub fn then(mut self, step: Step) -> Result<Self, ChainError> {
        self.apply(step)?;
        Ok(self)
    }

    /// Runs `step` and feeds every logger. When the step fails the frame and
    /// the loggers are left as they were.
    pub fn apply(&mut self, step: Step) -> Result<(), ChainError> {
        let label = step.label().to_string();
        let output = step.run(&self.frame).map_err(|message| ChainError::Step {
            label: label.clone(),
            message,
        })?;
        let event = LogEvent {
            expr_source: label,
            srcref: None,
            timestamp: self.clock.now(),
        };
        for logger in &mut self.loggers {
            logger
                .add(&event, &self.frame, &output)
                .map_err(|source| ChainError::Logger {
                    kind: logger.kind().to_string(),
                    source,
                })?;
        }
        self.frame = output;
        Ok(())
    }

    /// Dumps every logger with `args`, runs their stop hooks and hands back
    /// the frame. Dump messages and console output go to `console`.
    pub fn stop_with(
        self,
        args: &Args,
        console: &mut dyn Write,
    ) -> Result<(Frame, Vec<DumpReport>), ChainError> {
        if self.loggers.is_empty() {
            return Err(ChainError::NoLoggers);
        }
        if self.loggers.len() > 1 && args.contains("file") {
            return Err(ChainError::AmbiguousFile(self.loggers.len()));
        }
        let mut reports = Vec::new();
        for mut logger in self.loggers {
            let target = default_dump_target(None, logger.kind(), &self.dump_dir);
            let report = logger
                .dump(&target, &self.dump_dir, args, console)
                .map_err(|source| ChainError::Logger {
                    kind: logger.kind().to_string(),
                    source,
                })?;
            if let Some(dest) = &report.destination {
                let _ = writeln!(console, "{}", dump_message(dest));
            }
            logger.stop();
            reports.push(report);
        }
        Ok((self.frame, reports))
    }

    /// [`stop_with`](Self::stop_with) with no arguments, printing to
    /// standard output.
    pub fn stop(self) -> Result<Frame, ChainError> {
        self.stop_with(&Args::new(), &mut io::stdout())
            .map(|(f, _)| f)
    }
}
