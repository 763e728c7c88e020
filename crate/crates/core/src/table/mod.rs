//! The tabular data model: cells, frames, CSV I/O and keyed cell diffs.

mod csv;
mod diff;
mod frame;
mod value;

pub use csv::{parse_csv, read_csv, to_csv_string, write_csv, CsvError};
pub use diff::{apply_changes, cell_diff, CellChange, DiffError, KeySpec, Side};
pub use frame::{frames_identical, Column, Frame, FrameError};
pub use value::{values_identical, Value};
