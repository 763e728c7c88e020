#![allow(dead_code)]

use std::path::{Path, PathBuf};

use datatrace::clock::{FixedClock, Timestamp};
use datatrace::table::{values_identical, CellChange, Column, Frame, Value};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const EXCERPT: &str = "id,staff,turnover,other.rev,total.rev\n\
SPM01,75,NA,NA,1130\n\
SPM02,9,1607,NA,1607\n\
SPM03,NA,6886,-33,6919\n";

pub const TIME: &str = "2020-05-08T15:24:36+02:00";

pub fn fixed_clock() -> FixedClock {
    FixedClock(TIME.parse::<Timestamp>().unwrap())
}

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Copies the fixture directory into `dir`.
pub fn copy_fixtures(dir: &Path) {
    for entry in std::fs::read_dir(fixtures()).unwrap() {
        let entry = entry.unwrap();
        std::fs::copy(entry.path(), dir.join(entry.file_name())).unwrap();
    }
}

pub fn num(x: f64) -> Value {
    Value::Number(x)
}

pub fn text(s: &str) -> Value {
    Value::Text(s.to_string())
}

/// Small value pool so that equal values turn up often.
pub fn random_value(rng: &mut ChaCha8Rng, missing: f64) -> Value {
    if rng.gen_bool(missing) {
        return Value::Missing;
    }
    match rng.gen_range(0..4) {
        0 | 1 => Value::Number([-1.5, 0.0, -0.0, 1.0, 2.0, 1e-300, 1e300][rng.gen_range(0..7)]),
        2 => Value::Text(["a", "b", "NA", "", "x,y"][rng.gen_range(0..5)].to_string()),
        _ => Value::Boolean(rng.gen()),
    }
}

/// A pair of frames sharing key column `id`. The second differs by
/// changed cells, dropped and added rows and columns, and row order.
pub fn random_frame_pair(rng: &mut ChaCha8Rng, max_rows: usize, max_cols: usize) -> (Frame, Frame) {
    let missing = [0.0, 0.1, 0.5, 0.9][rng.gen_range(0..4)];
    let ncol = rng.gen_range(1..=max_cols);
    let nrow = rng.gen_range(0..=max_rows);
    let numeric_keys = rng.gen_bool(0.3);
    let key = |i: usize| {
        if numeric_keys {
            num(i as f64)
        } else {
            Value::Text(format!("k{i}"))
        }
    };
    let names: Vec<String> = (1..ncol).map(|c| format!("c{c}")).collect();

    let old_keys: Vec<usize> = (0..nrow).collect();
    let mut cols = vec![Column::new(
        "id",
        old_keys.iter().map(|&i| key(i)).collect(),
    )];
    for n in &names {
        cols.push(Column::new(
            n.as_str(),
            (0..nrow).map(|_| random_value(rng, missing)).collect(),
        ));
    }
    let old = Frame::new(cols).unwrap();

    // rows of new: most old keys, a few fresh ones, shuffled
    let mut new_keys: Vec<usize> = old_keys
        .iter()
        .copied()
        .filter(|_| rng.gen_bool(0.85))
        .collect();
    for extra in 0..rng.gen_range(0..3) {
        new_keys.push(max_rows + 1 + extra);
    }
    new_keys.truncate(max_rows);
    new_keys.shuffle(rng);

    let mut new_cols = vec![Column::new(
        "id",
        new_keys.iter().map(|&i| key(i)).collect(),
    )];
    let mut new_names: Vec<String> = names
        .iter()
        .filter(|_| rng.gen_bool(0.85))
        .cloned()
        .collect();
    if new_names.len() + 1 < max_cols && rng.gen_bool(0.4) {
        new_names.push("fresh".to_string());
    }
    new_names.shuffle(rng);
    let change_rate = rng.gen_range(0.0..0.5);
    for n in &new_names {
        let cells = new_keys
            .iter()
            .map(|&k| match old.column(n) {
                Some(c) if k < nrow && !rng.gen_bool(change_rate) => c.cells()[k].clone(),
                _ => random_value(rng, missing),
            })
            .collect();
        new_cols.push(Column::new(n.as_str(), cells));
    }
    let new = Frame::new(new_cols).unwrap();
    (old, new)
}

fn find_row(frame: &Frame, key_col: &str, key: &Value) -> Option<usize> {
    frame
        .column(key_col)?
        .cells()
        .iter()
        .position(|k| values_identical(k, key))
}

fn cell(frame: &Frame, key_col: &str, key: &Value, col: &str) -> Value {
    match (find_row(frame, key_col, key), frame.column(col)) {
        (Some(r), Some(c)) => c.cells()[r].clone(),
        _ => Value::Missing,
    }
}

/// Compares every (key, column) cell of the union of both frames with a
/// double loop, in the documented order.
pub fn brute_force_diff(old: &Frame, new: &Frame, key_col: &str) -> Vec<CellChange> {
    let mut keys: Vec<Value> = new.column(key_col).unwrap().cells().to_vec();
    for k in old.column(key_col).unwrap().cells() {
        if find_row(new, key_col, k).is_none() {
            keys.push(k.clone());
        }
    }
    let mut cols: Vec<String> = new.column_names().map(str::to_string).collect();
    for c in old.column_names() {
        if new.column(c).is_none() {
            cols.push(c.to_string());
        }
    }
    let mut out = Vec::new();
    for c in &cols {
        for k in &keys {
            let a = cell(old, key_col, k, c);
            let b = cell(new, key_col, k, c);
            if !values_identical(&a, &b) {
                out.push(CellChange::new(k.clone(), c.as_str(), a, b));
            }
        }
    }
    out
}

/// Checks `replayed` against `new` on every key and column the two share.
pub fn agrees_on_shared(replayed: &Frame, new: &Frame, key_col: &str) -> Result<(), String> {
    for k in new.column(key_col).unwrap().cells() {
        if find_row(replayed, key_col, k).is_none() {
            continue;
        }
        for c in new.column_names() {
            if replayed.column(c).is_none() {
                continue;
            }
            let a = cell(replayed, key_col, k, c);
            let b = cell(new, key_col, k, c);
            if !values_identical(&a, &b) {
                return Err(format!(
                    "key {k}, column {c}: replay gave {a}, expected {b}"
                ));
            }
        }
    }
    Ok(())
}

const NUMERIC: [&str; 3] = ["x", "y", "z"];

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..3) {
            0 => NUMERIC[rng.gen_range(0..3)].to_string(),
            1 => format!("{}", rng.gen_range(-5..10)),
            _ => "k".to_string(),
        };
    }
    let a = random_expr(rng, depth - 1);
    let b = random_expr(rng, depth - 1);
    match rng.gen_range(0..6) {
        0 => format!("{a} + {b}"),
        1 => format!("({a}) * {b}"),
        2 => format!("{a} / ({b})"),
        3 => format!("abs({a})"),
        4 => format!("ifelse(is_na({a}), 0, {a})"),
        _ => format!("ifelse({a} > {b}, {a}, {b} - 1)"),
    }
}

/// A random script over `data.csv` (columns id, x, y, z) plus the same script
/// with logging directives sprinkled in. Returns (plain, logged).
pub fn random_script_pair(rng: &mut ChaCha8Rng) -> (String, String) {
    let mut plain = vec![
        "d <- read_csv(\"data.csv\")".to_string(),
        "k <- 1".to_string(),
    ];
    let mut logged = plain.clone();
    let kinds = [
        "simple",
        "cellwise(key = \"id\")",
        "expression(m = \"mean(x, na_rm = TRUE)\")",
        "trivial",
        "filedump",
    ];
    let mut attached: Vec<&str> = Vec::new();
    let mut outputs = 0;
    for _ in 0..rng.gen_range(1..12) {
        // directives first, so they interleave with data statements
        if rng.gen_bool(0.4) {
            let spec = kinds[rng.gen_range(0..kinds.len())];
            let kind = spec.split('(').next().unwrap();
            if attached.contains(&kind) {
                if rng.gen_bool(0.5) {
                    logged.push(format!("stop_log(d, logger = \"{kind}\")"));
                    attached.retain(|k| *k != kind);
                } else {
                    logged.push(format!(
                        "dump_log(d, logger = \"{kind}\", file = \"early_{kind}.csv\")"
                    ));
                }
            } else {
                let ctor = if spec.contains('(') {
                    spec.to_string()
                } else {
                    format!("{spec}()")
                };
                logged.push(format!("start_log(d, {ctor})"));
                attached.push(kind);
            }
        }
        let stmt = match rng.gen_range(0..5) {
            0 => format!(
                "k <- mean(d${}, na_rm = TRUE)",
                NUMERIC[rng.gen_range(0..3)]
            ),
            1 | 2 => format!(
                "d <- transform(d, {} = {})",
                NUMERIC[rng.gen_range(0..3)],
                random_expr(rng, 3)
            ),
            3 => format!(
                "d <- transform(d,\n  {} = {},\n  w = {})",
                NUMERIC[rng.gen_range(0..3)],
                random_expr(rng, 2),
                random_expr(rng, 2)
            ),
            _ => {
                outputs += 1;
                format!("write_csv(d, \"out_{outputs}.csv\")")
            }
        };
        plain.push(stmt.clone());
        logged.push(stmt);
    }
    outputs += 1;
    let last = format!("write_csv(d, \"out_{outputs}.csv\")");
    plain.push(last.clone());
    logged.push(last);
    (plain.join("\n") + "\n", logged.join("\n") + "\n")
}

/// A CSV with columns id, x, y, z and some missing cells.
pub fn random_data_csv(rng: &mut ChaCha8Rng) -> String {
    let mut s = String::from("id,x,y,z\n");
    for i in 0..rng.gen_range(0..15) {
        s.push_str(&format!("\"r{i}\""));
        for _ in 0..3 {
            if rng.gen_bool(0.2) {
                s.push_str(",NA");
            } else {
                s.push_str(&format!(",{}", rng.gen_range(-50..50) as f64 / 4.0));
            }
        }
        s.push('\n');
    }
    s
}
