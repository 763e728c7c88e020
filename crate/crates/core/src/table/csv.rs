//! CSV reading and writing.
//!
//! Comma separated, `\n` line endings (`\r\n` accepted on input), RFC 4180
//! quoting. `NA` and empty unquoted fields read as missing. Text cells are
//! always written quoted, so a quoted field always reads back as text; this
//! keeps `"NA"` and numeric-looking strings distinct from real missings and
//! numbers after a round trip.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::frame::{Column, Frame};
use super::value::Value;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("cannot read `{path}`: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write `{path}`: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("line {line}: unterminated quoted field")]
    UnterminatedQuote { line: usize },
    #[error("line {line}: unexpected character after closing quote")]
    TrailingAfterQuote { line: usize },
    #[error("header has an empty column name")]
    EmptyHeader,
    #[error("duplicate header name `{0}`")]
    DuplicateHeader(String),
    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged {
        line: usize,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug)]
struct Field {
    text: String,
    quoted: bool,
}

struct Record {
    line: usize,
    fields: Vec<Field>,
}

fn split_records(input: &str) -> Result<Vec<Record>, CsvError> {
    let mut records = Vec::new();
    let mut fields = Vec::new();
    let mut field = String::new();
    let mut quoted = false;
    let mut line = 1;
    let mut record_line = 1;
    let mut chars = input.chars().peekable();
    // true once the current record has any content (so a final "\n" does
    // not produce an extra empty record)
    let mut started = false;

    while let Some(c) = chars.next() {
        match c {
            '"' if field.is_empty() && !quoted => {
                quoted = true;
                started = true;
                let open_line = line;
                loop {
                    match chars.next() {
                        Some('"') if chars.peek() == Some(&'"') => {
                            chars.next();
                            field.push('"');
                        }
                        Some('"') => break,
                        Some(ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            field.push(ch);
                        }
                        None => return Err(CsvError::UnterminatedQuote { line: open_line }),
                    }
                }
                match chars.peek() {
                    None | Some(',') | Some('\n') | Some('\r') => {}
                    Some(_) => return Err(CsvError::TrailingAfterQuote { line }),
                }
            }
            ',' => {
                fields.push(Field {
                    text: std::mem::take(&mut field),
                    quoted,
                });
                quoted = false;
                started = true;
            }
            '\r' if chars.peek() == Some(&'\n') => {}
            '\n' => {
                fields.push(Field {
                    text: std::mem::take(&mut field),
                    quoted,
                });
                records.push(Record {
                    line: record_line,
                    fields: std::mem::take(&mut fields),
                });
                quoted = false;
                started = false;
                line += 1;
                record_line = line;
            }
            other => {
                field.push(other);
                started = true;
            }
        }
    }
    if started {
        fields.push(Field {
            text: field,
            quoted,
        });
        records.push(Record {
            line: record_line,
            fields,
        });
    }
    Ok(records)
}

fn looks_numeric(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let mut digits = 0;
    let mut dots = 0;
    for c in mantissa.chars() {
        match c {
            '0'..='9' => digits += 1,
            '.' => dots += 1,
            _ => return false,
        }
    }
    if digits == 0 || dots > 1 {
        return false;
    }
    match exponent {
        None => true,
        Some(e) => {
            let e = e.strip_prefix(['+', '-']).unwrap_or(e);
            !e.is_empty() && e.chars().all(|c| c.is_ascii_digit())
        }
    }
}

fn parse_number(s: &str) -> Option<f64> {
    if looks_numeric(s) {
        s.parse().ok()
    } else {
        None
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "TRUE" => Some(true),
        "FALSE" => Some(false),
        _ => None,
    }
}

fn is_missing_token(f: &Field) -> bool {
    !f.quoted && (f.text == "NA" || f.text.is_empty())
}

/// Infers one column's cells.
///
/// Quoted fields are text and unquoted `NA`/empty are missing. The remaining
/// unquoted fields become numbers if all of them parse as numbers, booleans if
/// all are `TRUE`/`FALSE`, each parsed on its own if every one is a number or
/// a boolean, and text otherwise.
fn infer_column(fields: Vec<&Field>) -> Vec<Value> {
    let bare = || fields.iter().filter(|f| !f.quoted && !is_missing_token(f));
    let all_typed =
        bare().all(|f| parse_number(&f.text).is_some() || parse_bool(&f.text).is_some());
    fields
        .iter()
        .map(|f| {
            if f.quoted {
                Value::Text(f.text.clone())
            } else if is_missing_token(f) {
                Value::Missing
            } else if all_typed {
                parse_number(&f.text)
                    .map(Value::number)
                    .or_else(|| parse_bool(&f.text).map(Value::Boolean))
                    .unwrap_or(Value::Missing)
            } else {
                Value::Text(f.text.clone())
            }
        })
        .collect()
}

/// Parses CSV text into a frame.
pub fn parse_csv(input: &str) -> Result<Frame, CsvError> {
    let input = input.strip_prefix('\u{feff}').unwrap_or(input);
    let mut records = split_records(input)?.into_iter();
    let header = match records.next() {
        None => return Ok(Frame::default()),
        Some(h) if h.fields.len() == 1 && h.fields[0].text.is_empty() && !h.fields[0].quoted => {
            return Ok(Frame::default());
        }
        Some(h) => h.fields,
    };
    for (i, f) in header.iter().enumerate() {
        if f.text.is_empty() {
            return Err(CsvError::EmptyHeader);
        }
        if header[..i].iter().any(|g| g.text == f.text) {
            return Err(CsvError::DuplicateHeader(f.text.clone()));
        }
    }
    let rows: Vec<Record> = records.collect();
    for r in &rows {
        if r.fields.len() != header.len() {
            return Err(CsvError::Ragged {
                line: r.line,
                expected: header.len(),
                found: r.fields.len(),
            });
        }
    }
    let columns = header
        .iter()
        .enumerate()
        .map(|(j, h)| {
            let cells = infer_column(rows.iter().map(|r| &r.fields[j]).collect());
            Column::new(h.text.clone(), cells)
        })
        .collect();
    Ok(Frame::new(columns).expect("header names validated and rows checked for length"))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Frame, CsvError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CsvError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&text)
}

fn push_quoted(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        if c == '"' {
            out.push('"');
        }
        out.push(c);
    }
    out.push('"');
}

fn push_header(out: &mut String, name: &str) {
    if name.contains([',', '"', '\n', '\r']) || name == "NA" {
        push_quoted(out, name);
    } else {
        out.push_str(name);
    }
}

fn push_cell(out: &mut String, v: &Value) {
    match v {
        Value::Text(s) => push_quoted(out, s),
        other => out.push_str(&other.to_string()),
    }
}

/// Renders a frame as CSV text.
pub fn to_csv_string(frame: &Frame) -> String {
    let mut out = String::new();
    for (i, name) in frame.column_names().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_header(&mut out, name);
    }
    out.push('\n');
    for r in 0..frame.nrow() {
        for (i, col) in frame.columns().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            push_cell(&mut out, &col.cells()[r]);
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(frame: &Frame, path: impl AsRef<Path>) -> Result<(), CsvError> {
    let path = path.as_ref();
    fs::write(path, to_csv_string(frame)).map_err(|source| CsvError::Write {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::frame::frames_identical;
    use proptest::prelude::*;

    #[test]
    fn reads_na_as_missing() {
        let f = parse_csv("id,staff\nSPM01,75\nSPM03,NA\n").unwrap();
        assert_eq!(f.nrow(), 2);
        assert_eq!(f.ncol(), 2);
        assert_eq!(f.cell(0, "staff"), Some(&Value::Number(75.0)));
        assert_eq!(f.cell(1, "staff"), Some(&Value::Missing));
        assert_eq!(f.cell(0, "id"), Some(&Value::text("SPM01")));
    }

    #[test]
    fn header_only_gives_zero_rows() {
        let f = parse_csv("id,staff\n").unwrap();
        assert_eq!(f.nrow(), 0);
        assert_eq!(f.ncol(), 2);
    }

    #[test]
    fn negative_number() {
        let f = parse_csv("x\n-33\n").unwrap();
        assert_eq!(f.cell(0, "x"), Some(&Value::Number(-33.0)));
    }

    #[test]
    fn empty_field_is_missing() {
        let f = parse_csv("a,b\n1,\n").unwrap();
        assert_eq!(f.cell(0, "b"), Some(&Value::Missing));
    }

    #[test]
    fn mixed_column_is_text() {
        let f = parse_csv("a\nSPM01\n42\n").unwrap();
        assert_eq!(f.cell(1, "a"), Some(&Value::text("42")));
    }

    #[test]
    fn quoted_fields_stay_text() {
        let f = parse_csv("a\n\"NA\"\n\"7\"\nNA\n").unwrap();
        assert_eq!(f.cell(0, "a"), Some(&Value::text("NA")));
        assert_eq!(f.cell(1, "a"), Some(&Value::text("7")));
        assert_eq!(f.cell(2, "a"), Some(&Value::Missing));
    }

    #[test]
    fn quoted_field_with_comma_quote_and_newline() {
        let f = parse_csv("a,b\n\"x, \"\"y\"\"\nz\",1\n").unwrap();
        assert_eq!(f.cell(0, "a"), Some(&Value::text("x, \"y\"\nz")));
        assert_eq!(f.cell(0, "b"), Some(&Value::Number(1.0)));
    }

    #[test]
    fn crlf_accepted() {
        let f = parse_csv("a,b\r\n1,2\r\n").unwrap();
        assert_eq!(f.cell(0, "b"), Some(&Value::Number(2.0)));
    }

    #[test]
    fn booleans_inferred() {
        let f = parse_csv("a\nTRUE\nFALSE\nNA\n").unwrap();
        assert_eq!(f.cell(0, "a"), Some(&Value::Boolean(true)));
        assert_eq!(f.cell(2, "a"), Some(&Value::Missing));
    }

    #[test]
    fn inf_and_nan_are_text() {
        let f = parse_csv("a\ninf\nNaN\n").unwrap();
        assert_eq!(f.cell(0, "a"), Some(&Value::text("inf")));
    }

    #[test]
    fn duplicate_header_rejected() {
        assert!(matches!(
            parse_csv("a,a\n1,2\n"),
            Err(CsvError::DuplicateHeader(n)) if n == "a"
        ));
    }

    #[test]
    fn ragged_row_rejected() {
        assert!(matches!(
            parse_csv("a,b\n1,2\n3\n"),
            Err(CsvError::Ragged {
                line: 3,
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn unterminated_quote_rejected() {
        assert!(matches!(
            parse_csv("a\n\"abc\n"),
            Err(CsvError::UnterminatedQuote { line: 2 })
        ));
    }

    #[test]
    fn zero_row_frame_writes_header_only() {
        let f = Frame::from_columns([("id", vec![]), ("staff", vec![])]).unwrap();
        assert_eq!(to_csv_string(&f), "id,staff\n");
    }

    #[test]
    fn missing_written_as_na() {
        let f = Frame::from_columns([("x", vec![Value::Missing])]).unwrap();
        assert_eq!(to_csv_string(&f), "x\nNA\n");
    }

    #[test]
    fn ratio_round_trips_bit_exact() {
        let x = 6886.0 / 6919.0;
        let f = Frame::from_columns([("r", vec![Value::Number(x)])]).unwrap();
        let text = to_csv_string(&f);
        let back = parse_csv(&text).unwrap();
        assert_eq!(
            back.cell(0, "r").unwrap().as_number().unwrap().to_bits(),
            x.to_bits()
        );
    }

    #[test]
    fn missing_file_is_read_error() {
        assert!(matches!(
            read_csv("/nonexistent/x.csv"),
            Err(CsvError::Read { .. })
        ));
    }

    fn arb_value() -> impl Strategy<Value = Value> {
        prop_oneof![
            Just(Value::Missing),
            any::<f64>().prop_map(Value::number),
            (-1000i32..1000).prop_map(|i| Value::Number(f64::from(i))),
            any::<bool>().prop_map(Value::Boolean),
            "[ -~\n]{0,6}".prop_map(Value::Text),
        ]
    }

    fn arb_frame() -> impl Strategy<Value = Frame> {
        (0usize..5, 0usize..6).prop_flat_map(|(ncol, nrow)| {
            proptest::collection::vec(proptest::collection::vec(arb_value(), nrow), ncol).prop_map(
                |cols| {
                    Frame::new(
                        cols.into_iter()
                            .enumerate()
                            .map(|(i, cells)| Column::new(format!("c{i}"), cells))
                            .collect(),
                    )
                    .unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn write_read_is_lossless(f in arb_frame()) {
            let back = parse_csv(&to_csv_string(&f)).unwrap();
            prop_assert!(frames_identical(&f, &back));
        }

        #[test]
        fn write_read_write_is_idempotent(f in arb_frame()) {
            let first = to_csv_string(&f);
            let second = to_csv_string(&parse_csv(&first).unwrap());
            prop_assert_eq!(first, second);
        }
    }
}
