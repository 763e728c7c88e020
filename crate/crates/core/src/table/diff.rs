//! Keyed cell-level diff and its replay.
//!
//! Rows are matched by the value in a key column. A column present on one side
//! only, or a key present on one side only, is compared against `Missing` on
//! the absent side, so every difference is reported as one [`CellChange`].

use std::collections::HashMap;

use thiserror::Error;

use super::frame::{Column, Frame, FrameError};
use super::value::{values_identical, KeyRepr, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Old,
    New,
    Base,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Old => "old",
            Side::New => "new",
            Side::Base => "base",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffError {
    #[error("key column `{column}` not found in {side} frame")]
    MissingKeyColumn { column: String, side: Side },
    #[error("duplicate key {key} in {side} frame")]
    DuplicateKey { key: String, side: Side },
    #[error("missing key value in row {row} of {side} frame")]
    MissingKeyValue { row: usize, side: Side },
    #[error("change refers to unknown key {0}")]
    UnknownKey(String),
    #[error("conflicting changes for key {key}, variable `{variable}`")]
    ConflictingChanges { key: String, variable: String },
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// Names the column whose values identify rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySpec {
    column: String,
}

impl KeySpec {
    pub fn new(column: impl Into<String>) -> Self {
        KeySpec {
            column: column.into(),
        }
    }

    pub fn column(&self) -> &str {
        &self.column
    }
}

/// One changed cell. `old` and `new` are never identical.
#[derive(Debug, Clone, PartialEq)]
pub struct CellChange {
    pub key: Value,
    pub variable: String,
    pub old: Value,
    pub new: Value,
}

impl CellChange {
    pub fn new(key: impl Into<Value>, variable: impl Into<String>, old: Value, new: Value) -> Self {
        CellChange {
            key: key.into(),
            variable: variable.into(),
            old,
            new,
        }
    }

    /// The same change viewed in the opposite direction.
    pub fn reversed(&self) -> CellChange {
        CellChange {
            key: self.key.clone(),
            variable: self.variable.clone(),
            old: self.new.clone(),
            new: self.old.clone(),
        }
    }
}

struct KeyIndex<'a> {
    keys: &'a [Value],
    rows: HashMap<KeyRepr, usize>,
}

impl<'a> KeyIndex<'a> {
    fn build(frame: &'a Frame, key: &KeySpec, side: Side) -> Result<Self, DiffError> {
        let col = frame
            .column(key.column())
            .ok_or_else(|| DiffError::MissingKeyColumn {
                column: key.column().to_string(),
                side,
            })?;
        let mut rows = HashMap::with_capacity(col.len());
        for (row, v) in col.cells().iter().enumerate() {
            let repr = v
                .key_repr()
                .ok_or(DiffError::MissingKeyValue { row: row + 1, side })?;
            if rows.insert(repr, row).is_some() {
                return Err(DiffError::DuplicateKey {
                    key: v.to_string(),
                    side,
                });
            }
        }
        Ok(KeyIndex {
            keys: col.cells(),
            rows,
        })
    }

    fn row_of(&self, key: &Value) -> Option<usize> {
        key.key_repr().and_then(|k| self.rows.get(&k).copied())
    }
}

fn cell_or_missing(col: Option<&Column>, row: Option<usize>) -> &Value {
    const MISSING: &Value = &Value::Missing;
    match (col, row) {
        (Some(c), Some(r)) => &c.cells()[r],
        _ => MISSING,
    }
}

/// Lists every cell that differs between `old` and `new`, matching rows on `key`.
///
/// Output is ordered by column (the columns of `new` in order, then columns
/// only in `old`), and within a column by row (the rows of `new` in order,
/// then keys only in `old`).
pub fn cell_diff(old: &Frame, new: &Frame, key: &KeySpec) -> Result<Vec<CellChange>, DiffError> {
    let old_idx = KeyIndex::build(old, key, Side::Old)?;
    let new_idx = KeyIndex::build(new, key, Side::New)?;

    let mut rows: Vec<(&Value, Option<usize>, Option<usize>)> = new_idx
        .keys
        .iter()
        .enumerate()
        .map(|(r, k)| (k, old_idx.row_of(k), Some(r)))
        .collect();
    rows.extend(
        old_idx
            .keys
            .iter()
            .enumerate()
            .filter(|(_, k)| new_idx.row_of(k).is_none())
            .map(|(r, k)| (k, Some(r), None)),
    );

    let names = new
        .column_names()
        .chain(old.column_names().filter(|n| new.column(n).is_none()));

    let mut changes = Vec::new();
    for name in names {
        let old_col = old.column(name);
        let new_col = new.column(name);
        for &(k, old_row, new_row) in &rows {
            let before = cell_or_missing(old_col, old_row);
            let after = cell_or_missing(new_col, new_row);
            if !values_identical(before, after) {
                changes.push(CellChange {
                    key: k.clone(),
                    variable: name.to_string(),
                    old: before.clone(),
                    new: after.clone(),
                });
            }
        }
    }
    Ok(changes)
}

/// Writes each change's `new` value into `base`.
///
/// Columns named by a change but absent from `base` are appended, filled with
/// `Missing`, before the changes land. Every change key must exist in `base`.
pub fn apply_changes(
    base: &Frame,
    changes: &[CellChange],
    key: &KeySpec,
) -> Result<Frame, DiffError> {
    let idx = KeyIndex::build(base, key, Side::Base)?;
    let nrow = base.nrow();
    let mut columns: Vec<(String, Vec<Value>)> = base
        .columns()
        .iter()
        .map(|c| (c.name().to_string(), c.cells().to_vec()))
        .collect();
    let mut seen: HashMap<(KeyRepr, &str), ()> = HashMap::new();

    for change in changes {
        let row = idx
            .row_of(&change.key)
            .ok_or_else(|| DiffError::UnknownKey(change.key.to_string()))?;
        let repr = change
            .key
            .key_repr()
            .expect("row_of found it, so it is not missing");
        if seen.insert((repr, change.variable.as_str()), ()).is_some() {
            return Err(DiffError::ConflictingChanges {
                key: change.key.to_string(),
                variable: change.variable.clone(),
            });
        }
        let j = match columns.iter().position(|(n, _)| *n == change.variable) {
            Some(j) => j,
            None => {
                columns.push((change.variable.clone(), vec![Value::Missing; nrow]));
                columns.len() - 1
            }
        };
        columns[j].1[row] = change.new.clone();
    }
    Ok(Frame::from_columns(columns)?)
}
