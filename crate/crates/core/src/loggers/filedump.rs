use std::path::PathBuf;

use super::{resolve, AttachContext, DumpContext, DumpReport, LogMeta, Logger, LoggerError};
use crate::dsl::Args;
use crate::table::{write_csv, Frame, Value};

/// Writes the data after every step to `<dir>/<label>_<step>.csv`, with the
/// step zero-padded to three digits.
#[derive(Debug, Default)]
pub struct FileDump {
    dir: Option<String>,
    resolved: Option<PathBuf>,
    label: String,
    written: Vec<PathBuf>,
}

impl FileDump {
    /// Files go to the default target directory unless `dir` is given.
    pub fn new(dir: Option<&str>) -> Self {
        FileDump {
            dir: dir.map(str::to_string),
            resolved: None,
            label: "step".to_string(),
            written: Vec::new(),
        }
    }

    pub fn from_args(args: &Args) -> Result<Self, LoggerError> {
        let mut dir = None;
        for (name, value) in args.iter() {
            match (name, value) {
                ("dir", Value::Text(d)) => dir = Some(d.as_str()),
                ("dir", _) => {
                    return Err(LoggerError::bad_argument(
                        "filedump",
                        "`dir` must be a string",
                    ))
                }
                (other, _) => {
                    return Err(LoggerError::bad_argument(
                        "filedump",
                        format!("unexpected argument `{other}`"),
                    ))
                }
            }
        }
        Ok(FileDump::new(dir))
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.written
    }

    fn dir(&self) -> PathBuf {
        self.resolved
            .clone()
            .or_else(|| self.dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("filedump"))
    }
}

impl Logger for FileDump {
    fn kind(&self) -> &str {
        "filedump"
    }

    fn attach(&mut self, ctx: &AttachContext<'_>) {
        if let Some(label) = ctx.label {
            self.label = label.to_string();
        }
        self.resolved = Some(match &self.dir {
            Some(d) => resolve(ctx.base_dir, d),
            None => ctx.default_target.to_path_buf(),
        });
    }

    fn add(&mut self, meta: &LogMeta, _input: &Frame, output: &Frame) -> Result<(), LoggerError> {
        let dir = self.dir();
        std::fs::create_dir_all(&dir).map_err(|source| LoggerError::Io {
            path: dir.clone(),
            source,
        })?;
        let path = dir.join(format!("{}_{:03}.csv", self.label, meta.step));
        write_csv(output, &path)?;
        self.written.push(path);
        Ok(())
    }

    fn dump(&mut self, _ctx: &mut DumpContext<'_>) -> Result<DumpReport, LoggerError> {
        Ok(DumpReport::at(self.dir()))
    }
}
