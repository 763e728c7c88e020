use super::{meta_columns, write_log, DumpContext, DumpReport, LogMeta, Logger, LoggerError};
use crate::dsl::Args;
use crate::table::{frames_identical, Column, Frame, Value};

/// One row per step: metadata plus whether the output differs from the input.
#[derive(Debug, Default)]
pub struct Simple {
    rows: Vec<(LogMeta, bool)>,
}

impl Simple {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_args(args: &Args) -> Result<Self, LoggerError> {
        if let Some((name, _)) = args.iter().next() {
            return Err(LoggerError::bad_argument(
                "simple",
                format!("unexpected argument `{name}`"),
            ));
        }
        Ok(Self::new())
    }

    pub fn records(&self) -> &[(LogMeta, bool)] {
        &self.rows
    }

    pub fn to_frame(&self) -> Frame {
        let mut cols = meta_columns(self.rows.iter().map(|(m, _)| m));
        cols.push(Column::new(
            "changed",
            self.rows.iter().map(|(_, c)| Value::Boolean(*c)).collect(),
        ));
        Frame::new(cols).expect("log columns are distinct and equal length")
    }
}

impl Logger for Simple {
    fn kind(&self) -> &str {
        "simple"
    }

    fn add(&mut self, meta: &LogMeta, input: &Frame, output: &Frame) -> Result<(), LoggerError> {
        self.rows
            .push((meta.clone(), !frames_identical(input, output)));
        Ok(())
    }

    fn dump(&mut self, ctx: &mut DumpContext<'_>) -> Result<DumpReport, LoggerError> {
        write_log(&self.to_frame(), &ctx.file_target("simple")?)
    }
}
