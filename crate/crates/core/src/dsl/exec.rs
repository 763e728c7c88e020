use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use super::ast::{Expr, SrcRef, Statement, StatementKind};
use super::eval::{eval_expr, Binding, Env, EvalError};
use crate::table::{read_csv, write_csv, Column, CsvError, Frame, FrameError};

#[derive(Debug, Error)]
pub enum ExecErrorKind {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("unknown frame `{0}`")]
    UnknownFrame(String),
    #[error("`{0}` is not a frame")]
    NotAFrame(String),
    #[error("expression yields a column of {0} values where a scalar was expected")]
    ScalarExpected(usize),
    #[error("column `{column}`: {source}")]
    Assignment { column: String, source: EvalError },
}

/// A statement failed; carries the statement's source reference.
#[derive(Debug, Error)]
#[error("{srcref}: {kind}")]
pub struct ExecError {
    pub srcref: SrcRef,
    pub kind: ExecErrorKind,
}

fn frame_of(env: &Env, name: &str) -> Result<Arc<Frame>, ExecErrorKind> {
    match env.get(name) {
        Some(Binding::Frame(f)) => Ok(f.clone()),
        Some(Binding::Scalar(_)) => Err(ExecErrorKind::NotAFrame(name.to_string())),
        None => Err(ExecErrorKind::UnknownFrame(name.to_string())),
    }
}

fn resolve(base_dir: &Path, path: &str) -> PathBuf {
    let p = Path::new(path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base_dir.join(p)
    }
}

/// Executes the data part of a statement against `env`.
///
/// Relative CSV paths resolve against `base_dir`. Logging directives are
/// accepted and do nothing here.
pub fn exec_statement(stmt: &Statement, env: &mut Env, base_dir: &Path) -> Result<(), ExecError> {
    exec_kind(&stmt.kind, env, base_dir).map_err(|kind| ExecError {
        srcref: stmt.srcref.clone(),
        kind,
    })
}

/// Applies `col = expr` assignments in order, each seeing the columns made by
/// the ones before it. Names that are not columns resolve in `env`.
pub fn apply_transform(
    frame: &Frame,
    assignments: &[(String, Expr)],
    env: &Env,
) -> Result<Frame, ExecErrorKind> {
    let mut frame = frame.clone();
    for (column, expr) in assignments {
        let cells = eval_expr(expr, env, Some(&frame))
            .and_then(|r| r.into_cells(frame.nrow()))
            .map_err(|source| ExecErrorKind::Assignment {
                column: column.clone(),
                source,
            })?;
        frame = frame.with_column(Column::new(column.clone(), cells))?;
    }
    Ok(frame)
}

fn exec_kind(kind: &StatementKind, env: &mut Env, base_dir: &Path) -> Result<(), ExecErrorKind> {
    match kind {
        StatementKind::ReadCsv { target, path } => {
            let frame = read_csv(resolve(base_dir, path))?;
            env.bind_frame(target.clone(), frame);
        }
        StatementKind::WriteCsv { source, path } => {
            let frame = frame_of(env, source)?;
            write_csv(&frame, resolve(base_dir, path))?;
        }
        StatementKind::Transform {
            target,
            source,
            assignments,
        } => {
            let frame = apply_transform(&*frame_of(env, source)?, assignments, env)?;
            env.bind_frame(target.clone(), frame);
        }
        StatementKind::LetScalar { target, expr } => match eval_expr(expr, env, None)? {
            super::eval::Evaluated::Scalar(v) => env.bind_scalar(target.clone(), v),
            super::eval::Evaluated::Column(c) => {
                return Err(ExecErrorKind::ScalarExpected(c.len()))
            }
        },
        StatementKind::StartLog { .. }
        | StatementKind::StopLog { .. }
        | StatementKind::DumpLog { .. } => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_script;
    use crate::table::{parse_csv, Value};

    const EXCERPT: &str = "id,staff,turnover,other.rev,total.rev\n\
SPM01,75,NA,NA,1130\n\
SPM02,9,1607,NA,1607\n\
SPM03,NA,6886,-33,6919\n";

    fn env_with_excerpt() -> Env {
        let mut env = Env::new();
        env.bind_frame("spm", parse_csv(EXCERPT).unwrap());
        env
    }

    fn run(src: &str, env: &mut Env) -> Result<(), ExecError> {
        for s in parse_script(src, "t.ljk").unwrap().statements {
            exec_statement(&s, env, Path::new("."))?;
        }
        Ok(())
    }

    #[test]
    fn transform_adds_column() {
        let mut env = env_with_excerpt();
        run(
            "spm <- transform(spm, ratio = turnover / total.rev)",
            &mut env,
        )
        .unwrap();
        let f = env.frame("spm").unwrap();
        assert_eq!(f.ncol(), 6);
        assert_eq!(f.cell(0, "ratio"), Some(&Value::Missing));
        assert_eq!(f.cell(1, "ratio"), Some(&Value::Number(1.0)));
    }

    #[test]
    fn transform_assignments_are_sequential() {
        let mut env = env_with_excerpt();
        run(
            "spm <- transform(spm, a = 1, b = a + 1, a = b * 10)",
            &mut env,
        )
        .unwrap();
        let f = env.frame("spm").unwrap();
        assert_eq!(f.cell(2, "b"), Some(&Value::Number(2.0)));
        assert_eq!(f.cell(2, "a"), Some(&Value::Number(20.0)));
        assert_eq!(f.column_names().collect::<Vec<_>>()[5..], ["a", "b"]);
    }

    #[test]
    fn let_scalar_ratio_estimator() {
        let mut env = env_with_excerpt();
        run(
            "Rhat <- mean(spm$staff, na_rm = TRUE) / mean(spm$turnover, na_rm = TRUE)",
            &mut env,
        )
        .unwrap();
        let r = env.scalar("Rhat").unwrap().as_number().unwrap();
        let expected = ((75.0 + 9.0) / 2.0) / ((1607.0 + 6886.0) / 2.0);
        assert!((r - expected).abs() < 1e-15);
        assert!((r - 0.0098905).abs() < 1e-7);
    }

    #[test]
    fn transform_on_unknown_frame_cites_srcref() {
        let mut env = Env::new();
        let err = run("\n\nx <- transform(nope, a = 1)", &mut env).unwrap_err();
        assert_eq!(err.srcref.to_string(), "t.ljk#3-3");
        assert!(matches!(err.kind, ExecErrorKind::UnknownFrame(ref n) if n == "nope"));
        assert!(err.to_string().starts_with("t.ljk#3-3: "));
    }

    #[test]
    fn let_scalar_rejects_column() {
        let mut env = env_with_excerpt();
        let err = run("x <- spm$staff", &mut env).unwrap_err();
        assert!(matches!(err.kind, ExecErrorKind::ScalarExpected(3)));
    }

    #[test]
    fn directives_do_nothing() {
        let mut env = env_with_excerpt();
        run("start_log(spm, simple())\nstop_log(spm)", &mut env).unwrap();
        assert_eq!(env.names().count(), 1);
    }

    #[test]
    fn read_and_write_resolve_against_base_dir() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("in.csv"), EXCERPT).unwrap();
        let mut env = Env::new();
        for s in parse_script("d <- read_csv(\"in.csv\")\nwrite_csv(d, \"out.csv\")", "t")
            .unwrap()
            .statements
        {
            exec_statement(&s, &mut env, dir.path()).unwrap();
        }
        let out = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
        assert_eq!(
            out,
            "id,staff,turnover,other.rev,total.rev\n\"SPM01\",75,NA,NA,1130\n\"SPM02\",9,1607,NA,1607\n\"SPM03\",NA,6886,-33,6919\n"
        );
    }
}
