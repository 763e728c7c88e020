use std::fmt;

use crate::table::Value;

/// Where a statement sits in its script, rendered `file#first-last`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrcRef {
    pub file: String,
    pub first_line: usize,
    pub last_line: usize,
}

impl SrcRef {
    pub fn new(file: impl Into<String>, first_line: usize, last_line: usize) -> Self {
        debug_assert!(first_line >= 1 && first_line <= last_line);
        SrcRef {
            file: file.into(),
            first_line,
            last_line,
        }
    }
}

impl fmt::Display for SrcRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}-{}", self.file, self.first_line, self.last_line)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "&",
            BinaryOp::Or => "|",
        }
    }

    /// Binding strength; higher binds tighter. All binary operators are
    /// left-associative.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq
            | BinaryOp::Ne
            | BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Gt
            | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div => 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal(Value),
    /// A bare name: a column of the frame in scope, else a scalar binding.
    Name(String),
    /// `frame$column`
    Field {
        frame: String,
        column: String,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        name: String,
        args: Vec<Expr>,
        named: Vec<(String, Expr)>,
    },
    IfElse {
        cond: Box<Expr>,
        yes: Box<Expr>,
        no: Box<Expr>,
    },
}

impl Expr {
    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn unary(op: UnaryOp, operand: Expr) -> Expr {
        Expr::Unary {
            op,
            operand: Box::new(operand),
        }
    }

    /// True when the expression contains no aggregate call, so it evaluates
    /// row by row.
    pub fn is_elementwise(&self) -> bool {
        match self {
            Expr::Literal(_) | Expr::Name(_) | Expr::Field { .. } => true,
            Expr::Unary { operand, .. } => operand.is_elementwise(),
            Expr::Binary { lhs, rhs, .. } => lhs.is_elementwise() && rhs.is_elementwise(),
            Expr::Call { name, args, named } => {
                !super::eval::is_aggregate(name)
                    && args.iter().all(Expr::is_elementwise)
                    && named.iter().all(|(_, e)| e.is_elementwise())
            }
            Expr::IfElse { cond, yes, no } => {
                cond.is_elementwise() && yes.is_elementwise() && no.is_elementwise()
            }
        }
    }
}

/// Named literal arguments, in the order written.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Args(Vec<(String, Value)>);

impl Args {
    pub fn new() -> Self {
        Args(Vec::new())
    }

    pub fn with(mut self, name: impl Into<String>, value: impl Into<Value>) -> Self {
        self.push(name, value);
        self
    }

    pub fn push(&mut self, name: impl Into<String>, value: impl Into<Value>) {
        self.0.push((name.into(), value.into()));
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn get_text(&self, name: &str) -> Option<&str> {
        self.get(name).and_then(Value::as_text)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    /// Removes and returns the first argument called `name`.
    pub fn take(&mut self, name: &str) -> Option<Value> {
        let i = self.0.iter().position(|(n, _)| n == name)?;
        Some(self.0.remove(i).1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.0.iter().map(|(n, v)| (n.as_str(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

impl<N: Into<String>, V: Into<Value>> FromIterator<(N, V)> for Args {
    fn from_iter<T: IntoIterator<Item = (N, V)>>(iter: T) -> Self {
        Args(
            iter.into_iter()
                .map(|(n, v)| (n.into(), v.into()))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StatementKind {
    ReadCsv {
        target: String,
        path: String,
    },
    WriteCsv {
        source: String,
        path: String,
    },
    /// `target <- transform(source, col = expr, ...)`
    Transform {
        target: String,
        source: String,
        assignments: Vec<(String, Expr)>,
    },
    LetScalar {
        target: String,
        expr: Expr,
    },
    StartLog {
        variable: String,
        logger_kind: String,
        logger_args: Args,
    },
    StopLog {
        variable: String,
        logger_kind: Option<String>,
        dump_args: Args,
    },
    DumpLog {
        variable: String,
        logger_kind: Option<String>,
        dump_args: Args,
    },
}

impl StatementKind {
    pub fn is_directive(&self) -> bool {
        matches!(
            self,
            StatementKind::StartLog { .. }
                | StatementKind::StopLog { .. }
                | StatementKind::DumpLog { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub srcref: SrcRef,
    /// The statement exactly as written in the script.
    pub source: String,
    pub kind: StatementKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Script {
    pub source_file: String,
    pub statements: Vec<Statement>,
}

impl Script {
    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    /// The same script with every logging directive removed.
    pub fn without_directives(&self) -> Script {
        Script {
            source_file: self.source_file.clone(),
            statements: self
                .statements
                .iter()
                .filter(|s| !s.kind.is_directive())
                .cloned()
                .collect(),
        }
    }
}
