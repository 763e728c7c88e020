//! Vectorized expression evaluation.
//!
//! Every value is either a scalar or a column of cells. Binary operators work
//! cell by cell and broadcast a scalar against a column; two columns must have
//! the same length. Any operation touching `Missing` yields `Missing`, except
//! `is_na`, which inspects it, and `ifelse`, which only looks at the branch the
//! condition selects.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use super::ast::{BinaryOp, Expr, UnaryOp};
use crate::table::{Frame, Value};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("`{0}` is a frame; refer to one of its columns with `{0}$column`")]
    FrameUsedAsValue(String),
    #[error("`{0}` is not a frame")]
    NotAFrame(String),
    #[error("frame `{frame}` has no column `{column}`")]
    UnknownColumn { frame: String, column: String },
    #[error("length mismatch: {left} values against {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("{function}: {message}")]
    BadArguments { function: String, message: String },
    #[error("cannot apply `{op}` to {left} and {right}")]
    TypeMismatch {
        op: &'static str,
        left: &'static str,
        right: &'static str,
    },
    #[error("cannot apply `{op}` to {operand}")]
    BadOperand {
        op: &'static str,
        operand: &'static str,
    },
}

/// The result of evaluating an expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Evaluated {
    Scalar(Value),
    Column(Vec<Value>),
}

impl Evaluated {
    fn len(&self) -> Option<usize> {
        match self {
            Evaluated::Scalar(_) => None,
            Evaluated::Column(c) => Some(c.len()),
        }
    }

    fn get(&self, i: usize) -> &Value {
        match self {
            Evaluated::Scalar(v) => v,
            Evaluated::Column(c) => &c[i],
        }
    }

    /// Expands to `nrow` cells; a column must already have that length.
    pub fn into_cells(self, nrow: usize) -> Result<Vec<Value>, EvalError> {
        match self {
            Evaluated::Scalar(v) => Ok(vec![v; nrow]),
            Evaluated::Column(c) if c.len() == nrow => Ok(c),
            Evaluated::Column(c) => Err(EvalError::LengthMismatch {
                left: c.len(),
                right: nrow,
            }),
        }
    }

    pub fn into_scalar(self) -> Option<Value> {
        match self {
            Evaluated::Scalar(v) => Some(v),
            Evaluated::Column(_) => None,
        }
    }

    fn values(&self) -> &[Value] {
        match self {
            Evaluated::Scalar(v) => std::slice::from_ref(v),
            Evaluated::Column(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Binding {
    Frame(Arc<Frame>),
    Scalar(Value),
}

/// Name bindings of a running script.
#[derive(Debug, Clone, Default)]
pub struct Env {
    bindings: HashMap<String, Binding>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn get(&self, name: &str) -> Option<&Binding> {
        self.bindings.get(name)
    }

    pub fn frame(&self, name: &str) -> Option<&Arc<Frame>> {
        match self.bindings.get(name) {
            Some(Binding::Frame(f)) => Some(f),
            _ => None,
        }
    }

    pub fn scalar(&self, name: &str) -> Option<&Value> {
        match self.bindings.get(name) {
            Some(Binding::Scalar(v)) => Some(v),
            _ => None,
        }
    }

    pub fn bind_frame(&mut self, name: impl Into<String>, frame: impl Into<Arc<Frame>>) {
        self.bindings
            .insert(name.into(), Binding::Frame(frame.into()));
    }

    pub fn bind_scalar(&mut self, name: impl Into<String>, value: Value) {
        self.bindings.insert(name.into(), Binding::Scalar(value));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.bindings.keys().map(String::as_str)
    }
}

pub(crate) fn is_aggregate(name: &str) -> bool {
    matches!(name, "mean" | "sum" | "min" | "max")
}

/// Names of the builtin functions, for help output.
pub const BUILTINS: &[(&str, &str)] = &[
    ("is_na(x)", "TRUE where x is missing"),
    ("abs(x)", "absolute value"),
    (
        "ifelse(cond, yes, no)",
        "pick yes or no per row; missing cond gives NA",
    ),
    ("mean(x, na_rm = FALSE)", "arithmetic mean"),
    ("sum(x, na_rm = FALSE)", "sum; booleans count as 0/1"),
    ("min(x, na_rm = FALSE)", "smallest value"),
    ("max(x, na_rm = FALSE)", "largest value"),
];

/// Evaluates `expr`. Bare names resolve to columns of `frame_scope` first,
/// then to scalar bindings in `env`.
pub fn eval_expr(
    expr: &Expr,
    env: &Env,
    frame_scope: Option<&Frame>,
) -> Result<Evaluated, EvalError> {
    Evaluator {
        env,
        frame: frame_scope,
    }
    .eval(expr)
}

struct Evaluator<'a> {
    env: &'a Env,
    frame: Option<&'a Frame>,
}

fn combined_len(parts: &[&Evaluated]) -> Result<Option<usize>, EvalError> {
    let mut len = None;
    for p in parts {
        if let Some(n) = p.len() {
            match len {
                None => len = Some(n),
                Some(m) if m != n => return Err(EvalError::LengthMismatch { left: m, right: n }),
                _ => {}
            }
        }
    }
    Ok(len)
}

fn map1(
    x: Evaluated,
    f: impl Fn(&Value) -> Result<Value, EvalError>,
) -> Result<Evaluated, EvalError> {
    Ok(match x {
        Evaluated::Scalar(v) => Evaluated::Scalar(f(&v)?),
        Evaluated::Column(c) => Evaluated::Column(c.iter().map(f).collect::<Result<_, _>>()?),
    })
}

fn map2(
    a: &Evaluated,
    b: &Evaluated,
    f: impl Fn(&Value, &Value) -> Result<Value, EvalError>,
) -> Result<Evaluated, EvalError> {
    match combined_len(&[a, b])? {
        None => Ok(Evaluated::Scalar(f(a.get(0), b.get(0))?)),
        Some(n) => Ok(Evaluated::Column(
            (0..n)
                .map(|i| f(a.get(i), b.get(i)))
                .collect::<Result<_, _>>()?,
        )),
    }
}

fn binary_cell(op: BinaryOp, a: &Value, b: &Value) -> Result<Value, EvalError> {
    use BinaryOp::*;
    use Value::*;
    if a.is_missing() || b.is_missing() {
        return Ok(Missing);
    }
    let mismatch = || EvalError::TypeMismatch {
        op: op.symbol(),
        left: a.type_name(),
        right: b.type_name(),
    };
    Ok(match (op, a, b) {
        (Add, Number(x), Number(y)) => Value::number(x + y),
        (Sub, Number(x), Number(y)) => Value::number(x - y),
        (Mul, Number(x), Number(y)) => Value::number(x * y),
        (Div, Number(x), Number(y)) => {
            if *y == 0.0 {
                Missing
            } else {
                Value::number(x / y)
            }
        }
        (Eq, Number(x), Number(y)) => Boolean(x == y),
        (Ne, Number(x), Number(y)) => Boolean(x != y),
        (Lt, Number(x), Number(y)) => Boolean(x < y),
        (Le, Number(x), Number(y)) => Boolean(x <= y),
        (Gt, Number(x), Number(y)) => Boolean(x > y),
        (Ge, Number(x), Number(y)) => Boolean(x >= y),
        (Eq, Text(x), Text(y)) => Boolean(x == y),
        (Ne, Text(x), Text(y)) => Boolean(x != y),
        (Eq, Boolean(x), Boolean(y)) => Boolean(x == y),
        (Ne, Boolean(x), Boolean(y)) => Boolean(x != y),
        (And, Boolean(x), Boolean(y)) => Boolean(*x && *y),
        (Or, Boolean(x), Boolean(y)) => Boolean(*x || *y),
        _ => return Err(mismatch()),
    })
}

fn unary_cell(op: UnaryOp, v: &Value) -> Result<Value, EvalError> {
    match (op, v) {
        (_, Value::Missing) => Ok(Value::Missing),
        (UnaryOp::Neg, Value::Number(x)) => Ok(Value::Number(-x)),
        (UnaryOp::Not, Value::Boolean(b)) => Ok(Value::Boolean(!b)),
        (UnaryOp::Neg, other) => Err(EvalError::BadOperand {
            op: "-",
            operand: other.type_name(),
        }),
        (UnaryOp::Not, other) => Err(EvalError::BadOperand {
            op: "!",
            operand: other.type_name(),
        }),
    }
}

fn bad_args(function: &str, message: impl Into<String>) -> EvalError {
    EvalError::BadArguments {
        function: function.to_string(),
        message: message.into(),
    }
}

impl Evaluator<'_> {
    fn eval(&self, expr: &Expr) -> Result<Evaluated, EvalError> {
        match expr {
            Expr::Literal(v) => Ok(Evaluated::Scalar(v.clone())),
            Expr::Name(name) => self.name(name),
            Expr::Field { frame, column } => {
                let f = match self.env.get(frame) {
                    Some(Binding::Frame(f)) => f,
                    Some(Binding::Scalar(_)) => return Err(EvalError::NotAFrame(frame.clone())),
                    None => return Err(EvalError::UnknownName(frame.clone())),
                };
                let col = f.column(column).ok_or_else(|| EvalError::UnknownColumn {
                    frame: frame.clone(),
                    column: column.clone(),
                })?;
                Ok(Evaluated::Column(col.cells().to_vec()))
            }
            Expr::Unary { op, operand } => map1(self.eval(operand)?, |v| unary_cell(*op, v)),
            Expr::Binary { op, lhs, rhs } => {
                let a = self.eval(lhs)?;
                let b = self.eval(rhs)?;
                map2(&a, &b, |x, y| binary_cell(*op, x, y))
            }
            Expr::IfElse { cond, yes, no } => {
                let c = self.eval(cond)?;
                let y = self.eval(yes)?;
                let n = self.eval(no)?;
                let pick = |i: usize| -> Result<Value, EvalError> {
                    match c.get(i) {
                        Value::Boolean(true) => Ok(y.get(i).clone()),
                        Value::Boolean(false) => Ok(n.get(i).clone()),
                        Value::Missing => Ok(Value::Missing),
                        other => Err(bad_args(
                            "ifelse",
                            format!("condition must be boolean, got {}", other.type_name()),
                        )),
                    }
                };
                match combined_len(&[&c, &y, &n])? {
                    None => Ok(Evaluated::Scalar(pick(0)?)),
                    Some(len) => Ok(Evaluated::Column(
                        (0..len).map(pick).collect::<Result<_, _>>()?,
                    )),
                }
            }
            Expr::Call { name, args, named } => self.call(name, args, named),
        }
    }

    fn name(&self, name: &str) -> Result<Evaluated, EvalError> {
        if let Some(col) = self.frame.and_then(|f| f.column(name)) {
            return Ok(Evaluated::Column(col.cells().to_vec()));
        }
        match self.env.get(name) {
            Some(Binding::Scalar(v)) => Ok(Evaluated::Scalar(v.clone())),
            Some(Binding::Frame(_)) => Err(EvalError::FrameUsedAsValue(name.to_string())),
            None => Err(EvalError::UnknownName(name.to_string())),
        }
    }

    fn call(
        &self,
        name: &str,
        args: &[Expr],
        named: &[(String, Expr)],
    ) -> Result<Evaluated, EvalError> {
        let arity = |n: usize| -> Result<(), EvalError> {
            if args.len() != n {
                return Err(bad_args(
                    name,
                    format!("expected {n} positional argument(s), got {}", args.len()),
                ));
            }
            Ok(())
        };
        match name {
            "is_na" | "abs" => {
                arity(1)?;
                if let Some((n, _)) = named.first() {
                    return Err(bad_args(name, format!("unexpected argument `{n}`")));
                }
                let x = self.eval(&args[0])?;
                if name == "is_na" {
                    map1(x, |v| Ok(Value::Boolean(v.is_missing())))
                } else {
                    map1(x, |v| match v {
                        Value::Number(x) => Ok(Value::Number(x.abs())),
                        Value::Missing => Ok(Value::Missing),
                        other => Err(bad_args(
                            "abs",
                            format!("expected a number, got {}", other.type_name()),
                        )),
                    })
                }
            }
            "mean" | "sum" | "min" | "max" => {
                arity(1)?;
                let mut na_rm = false;
                for (n, e) in named {
                    if n != "na_rm" {
                        return Err(bad_args(name, format!("unexpected argument `{n}`")));
                    }
                    na_rm = match self.eval(e)? {
                        Evaluated::Scalar(Value::Boolean(b)) => b,
                        _ => return Err(bad_args(name, "na_rm must be TRUE or FALSE")),
                    };
                }
                let x = self.eval(&args[0])?;
                aggregate(name, x.values(), na_rm).map(Evaluated::Scalar)
            }
            "ifelse" => Err(bad_args(name, "takes exactly three positional arguments")),
            _ => Err(EvalError::UnknownFunction(name.to_string())),
        }
    }
}

fn aggregate(name: &str, cells: &[Value], na_rm: bool) -> Result<Value, EvalError> {
    let mut nums = Vec::with_capacity(cells.len());
    for v in cells {
        match v {
            Value::Number(x) => nums.push(*x),
            Value::Boolean(b) if matches!(name, "mean" | "sum") => {
                nums.push(if *b { 1.0 } else { 0.0 })
            }
            Value::Missing if na_rm => {}
            Value::Missing => return Ok(Value::Missing),
            other => {
                return Err(bad_args(
                    name,
                    format!("expected numbers, got {}", other.type_name()),
                ))
            }
        }
    }
    let sum = || nums.iter().sum::<f64>();
    Ok(match name {
        "sum" => Value::number(sum()),
        "mean" if nums.is_empty() => Value::Missing,
        "mean" => Value::number(sum() / nums.len() as f64),
        "min" => nums
            .iter()
            .copied()
            .reduce(f64::min)
            .map_or(Value::Missing, Value::number),
        "max" => nums
            .iter()
            .copied()
            .reduce(f64::max)
            .map_or(Value::Missing, Value::number),
        _ => unreachable!("not an aggregate: {name}"),
    })
}
