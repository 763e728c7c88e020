//! Canonical source rendering for scripts and expressions. Printing a parsed
//! script and parsing the output again yields the same AST.

use std::fmt::{self, Display, Formatter, Write};

use super::ast::{Args, Expr, Script, Statement, StatementKind, UnaryOp};
use super::lexer::{is_ident_continue, is_ident_start};
use crate::table::Value;

const NOT_PRECEDENCE: u8 = 3;
const NEG_PRECEDENCE: u8 = 7;
const ATOM: u8 = 8;

fn is_plain_name(name: &str) -> bool {
    let mut chars = name.chars();
    let first_ok = match chars.next() {
        Some('.') => !name[1..].starts_with(|c: char| c.is_ascii_digit()),
        Some(c) => is_ident_start(c),
        None => false,
    };
    first_ok && chars.all(is_ident_continue) && !matches!(name, "TRUE" | "FALSE" | "NA")
}

pub(crate) struct Name<'a>(pub &'a str);

impl Display for Name<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if is_plain_name(self.0) {
            f.write_str(self.0)
        } else {
            write!(f, "`{}`", self.0)
        }
    }
}

pub(crate) struct Literal<'a>(pub &'a Value);

impl Display for Literal<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            Value::Text(s) => {
                f.write_char('"')?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\r' => f.write_str("\\r")?,
                        '\t' => f.write_str("\\t")?,
                        c => f.write_char(c)?,
                    }
                }
                f.write_char('"')
            }
            other => write!(f, "{other}"),
        }
    }
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Binary { op, .. } => op.precedence(),
        Expr::Unary {
            op: UnaryOp::Not, ..
        } => NOT_PRECEDENCE,
        Expr::Unary {
            op: UnaryOp::Neg, ..
        } => NEG_PRECEDENCE,
        Expr::Literal(Value::Number(x)) if x.is_sign_negative() => NEG_PRECEDENCE,
        _ => ATOM,
    }
}

fn write_child(f: &mut Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(v) => write!(f, "{}", Literal(v)),
            Expr::Name(n) => write!(f, "{}", Name(n)),
            Expr::Field { frame, column } => write!(f, "{}${}", Name(frame), Name(column)),
            Expr::Unary {
                op: UnaryOp::Neg,
                operand,
            } => {
                f.write_char('-')?;
                match operand.as_ref() {
                    Expr::Literal(Value::Number(_)) => write!(f, "({operand})"),
                    other => write_child(f, other, ATOM),
                }
            }
            Expr::Unary {
                op: UnaryOp::Not,
                operand,
            } => {
                f.write_char('!')?;
                write_child(f, operand, NOT_PRECEDENCE)
            }
            Expr::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                write_child(f, lhs, p)?;
                write!(f, " {} ", op.symbol())?;
                write_child(f, rhs, p + 1)
            }
            Expr::Call { name, args, named } => {
                write!(f, "{}(", Name(name))?;
                let mut first = true;
                for a in args {
                    if !first {
                        f.write_str(", ")?;
                    }
                    first = false;
                    write!(f, "{a}")?;
                }
                for (n, a) in named {
                    if !first {
                        f.write_str(", ")?;
                    }
                    first = false;
                    write!(f, "{} = {a}", Name(n))?;
                }
                f.write_char(')')
            }
            Expr::IfElse { cond, yes, no } => write!(f, "ifelse({cond}, {yes}, {no})"),
        }
    }
}

fn write_args(f: &mut Formatter<'_>, args: &Args, leading_comma: bool) -> fmt::Result {
    for (i, (n, v)) in args.iter().enumerate() {
        if leading_comma || i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{} = {}", Name(n), Literal(v))?;
    }
    Ok(())
}

impl Display for StatementKind {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            StatementKind::ReadCsv { target, path } => {
                write!(
                    f,
                    "{} <- read_csv({})",
                    Name(target),
                    Literal(&Value::text(path.as_str()))
                )
            }
            StatementKind::WriteCsv { source, path } => {
                write!(
                    f,
                    "write_csv({}, {})",
                    Name(source),
                    Literal(&Value::text(path.as_str()))
                )
            }
            StatementKind::Transform {
                target,
                source,
                assignments,
            } => {
                write!(f, "{} <- transform({}", Name(target), Name(source))?;
                for (col, e) in assignments {
                    write!(f, ", {} = {e}", Name(col))?;
                }
                f.write_char(')')
            }
            StatementKind::LetScalar { target, expr } => write!(f, "{} <- {expr}", Name(target)),
            StatementKind::StartLog {
                variable,
                logger_kind,
                logger_args,
            } => {
                write!(f, "start_log({}, {}(", Name(variable), Name(logger_kind))?;
                write_args(f, logger_args, false)?;
                f.write_str("))")
            }
            StatementKind::StopLog {
                variable,
                logger_kind,
                dump_args,
            }
            | StatementKind::DumpLog {
                variable,
                logger_kind,
                dump_args,
            } => {
                let name = if matches!(self, StatementKind::StopLog { .. }) {
                    "stop_log"
                } else {
                    "dump_log"
                };
                write!(f, "{name}({}", Name(variable))?;
                if let Some(k) = logger_kind {
                    write!(f, ", logger = {}", Literal(&Value::text(k.as_str())))?;
                }
                write_args(f, dump_args, true)?;
                f.write_char(')')
            }
        }
    }
}

impl Display for Statement {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

impl Display for Script {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::ast::BinaryOp;
    use crate::dsl::parser::{parse_expr, parse_script};
    use proptest::prelude::*;

    #[test]
    fn prints_minimal_parentheses() {
        let e = parse_expr("(a + b) * c - (d - e)").unwrap();
        assert_eq!(e.to_string(), "(a + b) * c - (d - e)");
        let e = parse_expr("a == !b").unwrap();
        assert_eq!(e.to_string(), "a == (!b)");
    }

    #[test]
    fn odd_names_are_backquoted() {
        assert_eq!(Name("other.rev").to_string(), "other.rev");
        assert_eq!(Name("two words").to_string(), "`two words`");
        assert_eq!(Name("NA").to_string(), "`NA`");
        assert_eq!(Name(".5x").to_string(), "`.5x`");
    }

    #[test]
    fn fixture_statements_round_trip() {
        let src = r#"spm <- read_csv("supermarkets.csv")
start_log(spm, cellwise(key = "id"))
spm <- transform(spm, other.rev = ifelse(is_na(other.rev), 0, other.rev))
Rhat <- mean(spm$staff, na_rm = TRUE) / mean(spm$turnover, na_rm = TRUE)
stop_log(spm, logger = "cellwise", file = "my_custom_log.csv")
dump_log(spm)
write_csv(spm, "supermarkets_treated.csv")
"#;
        let s = parse_script(src, "f").unwrap();
        assert_eq!(s.to_string(), src);
    }

    const NAMES: &[&str] = &["a", "other.rev", "x_1", "two words", "NA", "mean"];
    const FUNCS: &[&str] = &["is_na", "abs", "mean", "sum", "f"];

    fn arb_literal() -> impl Strategy<Value = Value> {
        prop_oneof![
            (-1e6f64..1e6).prop_map(Value::Number),
            any::<f64>()
                .prop_filter("finite", |x| x.is_finite())
                .prop_map(Value::Number),
            Just(Value::Number(-0.0)),
            any::<bool>().prop_map(Value::Boolean),
            Just(Value::Missing),
            "[a-z\"\\\\\n ]{0,5}".prop_map(Value::Text),
        ]
    }

    fn arb_name() -> impl Strategy<Value = String> {
        proptest::sample::select(NAMES).prop_map(str::to_string)
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            arb_literal().prop_map(Expr::Literal),
            arb_name().prop_map(Expr::Name),
            (arb_name(), arb_name()).prop_map(|(frame, column)| Expr::Field { frame, column }),
        ];
        leaf.prop_recursive(4, 32, 3, |inner| {
            let ops = proptest::sample::select(vec![
                BinaryOp::Add,
                BinaryOp::Sub,
                BinaryOp::Mul,
                BinaryOp::Div,
                BinaryOp::Eq,
                BinaryOp::Ne,
                BinaryOp::Lt,
                BinaryOp::Le,
                BinaryOp::Gt,
                BinaryOp::Ge,
                BinaryOp::And,
                BinaryOp::Or,
            ]);
            prop_oneof![
                (ops, inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
                inner.clone().prop_map(|e| Expr::unary(UnaryOp::Neg, e)),
                inner.clone().prop_map(|e| Expr::unary(UnaryOp::Not, e)),
                (
                    proptest::sample::select(FUNCS),
                    proptest::collection::vec(inner.clone(), 0..3),
                    proptest::collection::vec((arb_name(), inner.clone()), 0..2),
                )
                    .prop_map(|(name, args, mut named)| {
                        named.dedup_by(|a, b| a.0 == b.0);
                        Expr::Call {
                            name: name.to_string(),
                            args,
                            named,
                        }
                    }),
                (inner.clone(), inner.clone(), inner).prop_map(|(c, y, n)| Expr::IfElse {
                    cond: Box::new(c),
                    yes: Box::new(y),
                    no: Box::new(n),
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn expr_print_parse_round_trip(e in arb_expr()) {
            let printed = e.to_string();
            let back = parse_expr(&printed).map_err(|err| TestCaseError::fail(format!("{printed}: {err}")))?;
            prop_assert_eq!(back, e, "printed as {}", printed);
        }

        #[test]
        fn statement_print_parse_round_trip(e in arb_expr(), col in arb_name(), var in arb_name()) {
            let kinds = vec![
                StatementKind::LetScalar { target: var.clone(), expr: e.clone() },
                StatementKind::Transform { target: var.clone(), source: var.clone(), assignments: vec![(col.clone(), e)] },
                StatementKind::StartLog { variable: var.clone(), logger_kind: "cellwise".into(), logger_args: Args::new().with("key", col.as_str()) },
                StatementKind::StopLog { variable: var.clone(), logger_kind: Some("simple".into()), dump_args: Args::new().with("dump", false) },
                StatementKind::DumpLog { variable: var, logger_kind: None, dump_args: Args::new().with("n", -2.5) },
            ];
            let src: String = kinds.iter().map(|k| format!("{k}\n")).collect();
            let parsed = parse_script(&src, "f").map_err(|err| TestCaseError::fail(format!("{src}: {err}")))?;
            let back: Vec<StatementKind> = parsed.statements.into_iter().map(|s| s.kind).collect();
            prop_assert_eq!(back, kinds);
        }
    }
}
