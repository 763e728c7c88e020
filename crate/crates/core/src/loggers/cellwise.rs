use super::{meta_columns, write_log, DumpContext, DumpReport, LogMeta, Logger, LoggerError};
use crate::dsl::Args;
use crate::table::{cell_diff, CellChange, Column, Frame, KeySpec, Value};

/// Records every cell whose value changed, identified by a key column.
#[derive(Debug)]
pub struct Cellwise {
    key: KeySpec,
    rows: Vec<(LogMeta, CellChange)>,
}

impl Cellwise {
    pub fn new(key: impl Into<String>) -> Self {
        Cellwise {
            key: KeySpec::new(key),
            rows: Vec::new(),
        }
    }

    pub fn from_args(args: &Args) -> Result<Self, LoggerError> {
        let mut key = None;
        for (name, value) in args.iter() {
            match (name, value) {
                ("key", Value::Text(k)) => key = Some(k.clone()),
                ("key", _) => {
                    return Err(LoggerError::bad_argument(
                        "cellwise",
                        "`key` must be a string",
                    ))
                }
                (other, _) => {
                    return Err(LoggerError::bad_argument(
                        "cellwise",
                        format!("unexpected argument `{other}`"),
                    ))
                }
            }
        }
        key.map(Cellwise::new)
            .ok_or_else(|| LoggerError::bad_argument("cellwise", "missing required argument `key`"))
    }

    pub fn key(&self) -> &KeySpec {
        &self.key
    }

    pub fn records(&self) -> &[(LogMeta, CellChange)] {
        &self.rows
    }

    /// Columns `step,time,srcref,expression,key,variable,old,new`.
    pub fn to_frame(&self) -> Frame {
        let mut cols = meta_columns(self.rows.iter().map(|(m, _)| m));
        let pick = |f: fn(&CellChange) -> Value| self.rows.iter().map(|(_, c)| f(c)).collect();
        cols.push(Column::new("key", pick(|c| c.key.clone())));
        cols.push(Column::new(
            "variable",
            pick(|c| Value::Text(c.variable.clone())),
        ));
        cols.push(Column::new("old", pick(|c| c.old.clone())));
        cols.push(Column::new("new", pick(|c| c.new.clone())));
        Frame::new(cols).expect("log columns are distinct and equal length")
    }
}

impl Logger for Cellwise {
    fn kind(&self) -> &str {
        "cellwise"
    }

    fn add(&mut self, meta: &LogMeta, input: &Frame, output: &Frame) -> Result<(), LoggerError> {
        let changes = cell_diff(input, output, &self.key)?;
        self.rows
            .extend(changes.into_iter().map(|c| (meta.clone(), c)));
        Ok(())
    }

    fn dump(&mut self, ctx: &mut DumpContext<'_>) -> Result<DumpReport, LoggerError> {
        write_log(&self.to_frame(), &ctx.file_target("cellwise")?)
    }
}
