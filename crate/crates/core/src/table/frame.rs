use thiserror::Error;

use super::value::{values_identical, Value};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("column names must be non-empty")]
    EmptyColumnName,
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("column `{name}` has {len} rows, expected {expected}")]
    LengthMismatch {
        name: String,
        len: usize,
        expected: usize,
    },
    #[error("no column named `{0}`")]
    UnknownColumn(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    name: String,
    cells: Vec<Value>,
}

impl Column {
    pub fn new(name: impl Into<String>, cells: Vec<Value>) -> Self {
        Column {
            name: name.into(),
            cells,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cells(&self) -> &[Value] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn into_cells(self) -> Vec<Value> {
        self.cells
    }
}

/// Named, equal-length columns. Immutable once built; every "modification"
/// returns a new frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Frame {
    columns: Vec<Column>,
}

impl Frame {
    pub fn new(columns: Vec<Column>) -> Result<Self, FrameError> {
        let expected = columns.first().map_or(0, Column::len);
        for (i, col) in columns.iter().enumerate() {
            if col.name.is_empty() {
                return Err(FrameError::EmptyColumnName);
            }
            if columns[..i].iter().any(|c| c.name == col.name) {
                return Err(FrameError::DuplicateColumn(col.name.clone()));
            }
            if col.len() != expected {
                return Err(FrameError::LengthMismatch {
                    name: col.name.clone(),
                    len: col.len(),
                    expected,
                });
            }
        }
        Ok(Frame { columns })
    }

    /// Convenience constructor from `(name, cells)` pairs.
    pub fn from_columns<N, I>(columns: I) -> Result<Self, FrameError>
    where
        N: Into<String>,
        I: IntoIterator<Item = (N, Vec<Value>)>,
    {
        Frame::new(
            columns
                .into_iter()
                .map(|(n, cells)| Column::new(n, cells))
                .collect(),
        )
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn ncol(&self) -> usize {
        self.columns.len()
    }

    pub fn nrow(&self) -> usize {
        self.columns.first().map_or(0, Column::len)
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn cell(&self, row: usize, column: &str) -> Option<&Value> {
        self.column(column).and_then(|c| c.cells.get(row))
    }

    pub fn row(&self, row: usize) -> Vec<&Value> {
        self.columns.iter().map(|c| &c.cells[row]).collect()
    }

    /// Returns a frame where `column` is replaced, or appended when absent.
    pub fn with_column(&self, column: Column) -> Result<Frame, FrameError> {
        let mut columns = self.columns.clone();
        match self.column_index(&column.name) {
            Some(i) => columns[i] = column,
            None => columns.push(column),
        }
        Frame::new(columns)
    }

    /// First `n` rows (all rows when the frame is shorter).
    pub fn head(&self, n: usize) -> Frame {
        self.select_rows(0..n.min(self.nrow()))
    }

    pub fn select_rows(&self, rows: impl IntoIterator<Item = usize> + Clone) -> Frame {
        Frame {
            columns: self
                .columns
                .iter()
                .map(|c| Column {
                    name: c.name.clone(),
                    cells: rows
                        .clone()
                        .into_iter()
                        .map(|r| c.cells[r].clone())
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn into_columns(self) -> Vec<Column> {
        self.columns
    }
}

/// Same column names in the same order, same row count, every cell identical.
pub fn frames_identical(a: &Frame, b: &Frame) -> bool {
    a.ncol() == b.ncol()
        && a.nrow() == b.nrow()
        && a.columns.iter().zip(&b.columns).all(|(x, y)| {
            x.name == y.name
                && x.cells
                    .iter()
                    .zip(&y.cells)
                    .all(|(p, q)| values_identical(p, q))
        })
}
