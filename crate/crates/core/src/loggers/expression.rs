use super::{
    meta_columns, write_log, DumpContext, DumpReport, LogMeta, Logger, LoggerError, META_COLUMNS,
};
use crate::dsl::{eval_expr, parse_expr, Args, Env, Evaluated, Expr};
use crate::table::{Column, Frame, Value};

/// Evaluates named summary expressions on the data after each step. Each
/// expression must reduce to a single value, e.g. `mean(staff, na_rm = TRUE)`.
#[derive(Debug)]
pub struct ExpressionLogger {
    exprs: Vec<(String, Expr)>,
    rows: Vec<(LogMeta, Vec<Value>)>,
}

impl ExpressionLogger {
    pub fn new<N, S, I>(exprs: I) -> Result<Self, LoggerError>
    where
        N: Into<String>,
        S: AsRef<str>,
        I: IntoIterator<Item = (N, S)>,
    {
        let mut parsed: Vec<(String, Expr)> = Vec::new();
        for (name, src) in exprs {
            let name = name.into();
            if META_COLUMNS.contains(&name.as_str()) || parsed.iter().any(|(n, _)| *n == name) {
                return Err(LoggerError::bad_argument(
                    "expression",
                    format!("column name `{name}` is already taken"),
                ));
            }
            let e = parse_expr(src.as_ref()).map_err(|source| LoggerError::ExpressionParse {
                name: name.clone(),
                source,
            })?;
            parsed.push((name, e));
        }
        if parsed.is_empty() {
            return Err(LoggerError::bad_argument(
                "expression",
                "needs at least one expression",
            ));
        }
        Ok(ExpressionLogger {
            exprs: parsed,
            rows: Vec::new(),
        })
    }

    /// Every argument is `name = "expression source"`.
    pub fn from_args(args: &Args) -> Result<Self, LoggerError> {
        let mut pairs = Vec::new();
        for (name, value) in args.iter() {
            match value {
                Value::Text(src) => pairs.push((name.to_string(), src.clone())),
                _ => {
                    return Err(LoggerError::bad_argument(
                        "expression",
                        format!("`{name}` must be an expression in quotes"),
                    ))
                }
            }
        }
        Self::new(pairs)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.exprs.iter().map(|(n, _)| n.as_str())
    }

    pub fn records(&self) -> &[(LogMeta, Vec<Value>)] {
        &self.rows
    }

    pub fn to_frame(&self) -> Frame {
        let mut cols = meta_columns(self.rows.iter().map(|(m, _)| m));
        for (i, (name, _)) in self.exprs.iter().enumerate() {
            cols.push(Column::new(
                name.as_str(),
                self.rows.iter().map(|(_, v)| v[i].clone()).collect(),
            ));
        }
        Frame::new(cols).expect("expression names were checked at construction")
    }
}

impl Logger for ExpressionLogger {
    fn kind(&self) -> &str {
        "expression"
    }

    fn add(&mut self, meta: &LogMeta, _input: &Frame, output: &Frame) -> Result<(), LoggerError> {
        let env = Env::new();
        let mut values = Vec::with_capacity(self.exprs.len());
        for (name, e) in &self.exprs {
            match eval_expr(e, &env, Some(output)) {
                Ok(Evaluated::Scalar(v)) => values.push(v),
                Ok(Evaluated::Column(_)) => {
                    return Err(LoggerError::bad_argument(
                        "expression",
                        format!(
                            "`{name}` gives one value per row; wrap it in a summary such as mean()"
                        ),
                    ))
                }
                Err(source) => {
                    return Err(LoggerError::Expression {
                        name: name.clone(),
                        source,
                    })
                }
            }
        }
        self.rows.push((meta.clone(), values));
        Ok(())
    }

    fn dump(&mut self, ctx: &mut DumpContext<'_>) -> Result<DumpReport, LoggerError> {
        write_log(&self.to_frame(), &ctx.file_target("expression")?)
    }
}
