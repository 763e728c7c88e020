use thiserror::Error;

use super::ast::{Args, BinaryOp, Expr, Script, SrcRef, Statement, StatementKind, UnaryOp};
use super::lexer::{tokenize, LexError, Token, TokenKind};
use crate::table::Value;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> Self {
        ParseError {
            line: e.line,
            column: e.column,
            message: e.message,
        }
    }
}

type PResult<T> = Result<T, ParseError>;

struct Parser<'a> {
    source: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(source: &'a str) -> PResult<Self> {
        Ok(Parser {
            source,
            tokens: tokenize(source)?,
            pos: 0,
        })
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, offset: usize) -> Option<&TokenKind> {
        self.tokens.get(self.pos + offset).map(|t| &t.kind)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn advance(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = match self.tokens.get(self.pos) {
            Some(t) => (t.line, t.column),
            None => self.tokens.last().map_or((1, 1), |t| (t.line, t.column)),
        };
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(found) => self.error_here(format!("expected {wanted}, found {found}")),
            None => self.error_here(format!("expected {wanted}, found end of input")),
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: &TokenKind, wanted: &str) -> PResult<()> {
        if self.eat(kind) {
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn skip_newlines(&mut self) {
        while self.peek() == Some(&TokenKind::Newline) {
            self.pos += 1;
        }
    }

    fn ident(&mut self, wanted: &str) -> PResult<String> {
        match self.peek() {
            Some(TokenKind::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn string(&mut self, wanted: &str) -> PResult<String> {
        match self.peek() {
            Some(TokenKind::Str(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn is_call_to(&self, name: &str) -> bool {
        matches!(self.peek(), Some(TokenKind::Ident(n)) if n == name)
            && self.peek_at(1) == Some(&TokenKind::LParen)
    }

    // ---- statements ----

    fn script(mut self, file_name: &str) -> PResult<Script> {
        let mut statements = Vec::new();
        self.skip_newlines();
        while !self.at_end() {
            let first = self.pos;
            let kind = self.statement()?;
            let last = self.pos - 1;
            if !self.at_end() && !self.eat(&TokenKind::Newline) {
                return Err(self.unexpected("end of statement"));
            }
            let (a, b) = (&self.tokens[first], &self.tokens[last]);
            statements.push(Statement {
                srcref: SrcRef::new(file_name, a.line, b.line),
                source: self.source[a.start..b.end].to_string(),
                kind,
            });
            self.skip_newlines();
        }
        Ok(Script {
            source_file: file_name.to_string(),
            statements,
        })
    }

    fn statement(&mut self) -> PResult<StatementKind> {
        if matches!(self.peek(), Some(TokenKind::Ident(_)))
            && self.peek_at(1) == Some(&TokenKind::Assign)
        {
            let target = self.ident("a name")?;
            self.advance();
            self.skip_newlines();
            if self.is_call_to("read_csv") {
                self.pos += 2;
                let path = self.string("a file path string")?;
                self.expect(&TokenKind::RParen, "`)`")?;
                return Ok(StatementKind::ReadCsv { target, path });
            }
            if self.is_call_to("transform") {
                self.pos += 2;
                let source = self.ident("the name of the frame to transform")?;
                let assignments = self.assignments()?;
                return Ok(StatementKind::Transform {
                    target,
                    source,
                    assignments,
                });
            }
            let expr = self.expr()?;
            return Ok(StatementKind::LetScalar { target, expr });
        }
        if self.is_call_to("write_csv") {
            self.pos += 2;
            let source = self.ident("the name of the frame to write")?;
            self.expect(&TokenKind::Comma, "`,`")?;
            let path = self.string("a file path string")?;
            self.expect(&TokenKind::RParen, "`)`")?;
            return Ok(StatementKind::WriteCsv { source, path });
        }
        if self.is_call_to("start_log") {
            self.pos += 2;
            let variable = self.ident("the name of the variable to track")?;
            self.expect(&TokenKind::Comma, "`,`")?;
            if matches!(self.peek(), Some(TokenKind::Ident(n)) if n == "logger")
                && self.peek_at(1) == Some(&TokenKind::Eq)
            {
                self.pos += 2;
            }
            let logger_kind = self.ident("a logger, e.g. cellwise(key = \"id\")")?;
            self.expect(&TokenKind::LParen, "`(`")?;
            let logger_args = self.literal_args(false)?;
            self.expect(&TokenKind::RParen, "`)` closing the logger arguments")?;
            self.expect(&TokenKind::RParen, "`)` closing start_log")?;
            return Ok(StatementKind::StartLog {
                variable,
                logger_kind,
                logger_args,
            });
        }
        for directive in ["stop_log", "dump_log"] {
            if self.is_call_to(directive) {
                self.pos += 2;
                let variable = self.ident("the name of a tracked variable")?;
                let mut dump_args = self.literal_args(true)?;
                let logger_kind = match dump_args.take("logger") {
                    None => None,
                    Some(Value::Text(k)) => Some(k),
                    Some(_) => {
                        return Err(
                            self.error_here("`logger` must be a string naming a logger kind")
                        )
                    }
                };
                return Ok(if directive == "stop_log" {
                    StatementKind::StopLog {
                        variable,
                        logger_kind,
                        dump_args,
                    }
                } else {
                    StatementKind::DumpLog {
                        variable,
                        logger_kind,
                        dump_args,
                    }
                });
            }
        }
        Err(self.error_here(
            "unknown statement form; expected an assignment, write_csv, start_log, stop_log or dump_log",
        ))
    }

    /// `{ "," name "=" expr } ")"`
    fn assignments(&mut self) -> PResult<Vec<(String, Expr)>> {
        let mut out = Vec::new();
        while self.eat(&TokenKind::Comma) {
            let name = self.ident("a column name")?;
            self.expect(&TokenKind::Eq, "`=`")?;
            out.push((name, self.expr()?));
        }
        self.expect(&TokenKind::RParen, "`,` or `)`")?;
        Ok(out)
    }

    /// Named literal arguments. With `leading_comma` the list continues an
    /// argument list and runs up to and including the closing parenthesis.
    fn literal_args(&mut self, leading_comma: bool) -> PResult<Args> {
        let mut args = Args::new();
        if leading_comma {
            while self.eat(&TokenKind::Comma) {
                self.literal_arg(&mut args)?;
            }
            self.expect(&TokenKind::RParen, "`,` or `)`")?;
            return Ok(args);
        }
        if self.peek() == Some(&TokenKind::RParen) {
            return Ok(args);
        }
        loop {
            self.literal_arg(&mut args)?;
            if !self.eat(&TokenKind::Comma) {
                return Ok(args);
            }
        }
    }

    fn literal_arg(&mut self, args: &mut Args) -> PResult<()> {
        let name = self.ident("an argument name")?;
        if args.contains(&name) {
            return Err(self.error_here(format!("argument `{name}` given twice")));
        }
        self.expect(&TokenKind::Eq, "`=`")?;
        let value = self.literal()?;
        args.push(name, value);
        Ok(())
    }

    fn literal(&mut self) -> PResult<Value> {
        let v = match self.peek() {
            Some(TokenKind::Str(s)) => Value::Text(s.clone()),
            Some(TokenKind::Number(x)) => Value::Number(*x),
            Some(TokenKind::True) => Value::Boolean(true),
            Some(TokenKind::False) => Value::Boolean(false),
            Some(TokenKind::Na) => Value::Missing,
            Some(TokenKind::Minus) => match self.peek_at(1) {
                Some(TokenKind::Number(x)) => {
                    let x = -*x;
                    self.pos += 2;
                    return Ok(Value::Number(x));
                }
                _ => return Err(self.error_here("argument values must be literals")),
            },
            _ => {
                return Err(self.error_here(
                    "argument values must be literals (string, number, TRUE, FALSE or NA)",
                ))
            }
        };
        self.pos += 1;
        Ok(v)
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<Expr> {
        self.binary_level(1)
    }

    fn binary_op(kind: &TokenKind) -> Option<BinaryOp> {
        Some(match kind {
            TokenKind::Pipe => BinaryOp::Or,
            TokenKind::Amp => BinaryOp::And,
            TokenKind::EqEq => BinaryOp::Eq,
            TokenKind::NotEq => BinaryOp::Ne,
            TokenKind::Lt => BinaryOp::Lt,
            TokenKind::Le => BinaryOp::Le,
            TokenKind::Gt => BinaryOp::Gt,
            TokenKind::Ge => BinaryOp::Ge,
            TokenKind::Plus => BinaryOp::Add,
            TokenKind::Minus => BinaryOp::Sub,
            TokenKind::Star => BinaryOp::Mul,
            TokenKind::Slash => BinaryOp::Div,
            _ => return None,
        })
    }

    /// Precedence climbing over the binary operators; `!` sits between `&`
    /// and the comparisons.
    fn binary_level(&mut self, min: u8) -> PResult<Expr> {
        let mut lhs = if min <= 3 && self.peek() == Some(&TokenKind::Bang) {
            self.advance();
            Expr::unary(UnaryOp::Not, self.binary_level(3)?)
        } else {
            self.unary()?
        };
        while let Some(op) = self.peek().and_then(Self::binary_op) {
            let prec = op.precedence();
            if prec < min {
                break;
            }
            self.advance();
            self.skip_newlines();
            let rhs = self.binary_level(prec + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        match self.peek() {
            Some(TokenKind::Minus) => {
                self.advance();
                if let Some(TokenKind::Number(x)) = self.peek() {
                    let x = -*x;
                    self.advance();
                    return Ok(Expr::Literal(Value::Number(x)));
                }
                Ok(Expr::unary(UnaryOp::Neg, self.unary()?))
            }
            Some(TokenKind::Bang) => {
                self.advance();
                Ok(Expr::unary(UnaryOp::Not, self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let Some(kind) = self.peek().cloned() else {
            return Err(self.unexpected("an expression"));
        };
        match kind {
            TokenKind::Number(x) => {
                self.advance();
                Ok(Expr::Literal(Value::Number(x)))
            }
            TokenKind::Str(s) => {
                self.advance();
                Ok(Expr::Literal(Value::Text(s)))
            }
            TokenKind::True => {
                self.advance();
                Ok(Expr::Literal(Value::Boolean(true)))
            }
            TokenKind::False => {
                self.advance();
                Ok(Expr::Literal(Value::Boolean(false)))
            }
            TokenKind::Na => {
                self.advance();
                Ok(Expr::Literal(Value::Missing))
            }
            TokenKind::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(&TokenKind::RParen, "`)`")?;
                Ok(e)
            }
            TokenKind::Ident(name) => {
                self.advance();
                if self.eat(&TokenKind::LParen) {
                    return self.call(name);
                }
                if self.eat(&TokenKind::Dollar) {
                    let column = self.ident("a column name after `$`")?;
                    return Ok(Expr::Field {
                        frame: name,
                        column,
                    });
                }
                Ok(Expr::Name(name))
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn call(&mut self, name: String) -> PResult<Expr> {
        let mut args = Vec::new();
        let mut named: Vec<(String, Expr)> = Vec::new();
        if !self.eat(&TokenKind::RParen) {
            loop {
                if let (Some(TokenKind::Ident(arg)), Some(TokenKind::Eq)) =
                    (self.peek(), self.peek_at(1))
                {
                    let arg = arg.clone();
                    if named.iter().any(|(n, _)| *n == arg) {
                        return Err(self.error_here(format!("argument `{arg}` given twice")));
                    }
                    self.pos += 2;
                    named.push((arg, self.expr()?));
                } else {
                    args.push(self.expr()?);
                }
                if self.eat(&TokenKind::RParen) {
                    break;
                }
                self.expect(&TokenKind::Comma, "`,` or `)`")?;
            }
        }
        if name == "ifelse" {
            if !named.is_empty() || args.len() != 3 {
                return Err(self.error_here("ifelse takes exactly three positional arguments"));
            }
            let mut it = args.into_iter();
            let (cond, yes, no) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
            return Ok(Expr::IfElse {
                cond: Box::new(cond),
                yes: Box::new(yes),
                no: Box::new(no),
            });
        }
        Ok(Expr::Call { name, args, named })
    }
}

/// Parses a whole script. `file_name` is what source references will cite.
pub fn parse_script(source: &str, file_name: &str) -> Result<Script, ParseError> {
    Parser::new(source)?.script(file_name)
}

/// Parses a single expression, e.g. `mean(staff, na_rm = TRUE)`.
pub fn parse_expr(source: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(source)?;
    p.skip_newlines();
    let e = p.expr()?;
    p.skip_newlines();
    if !p.at_end() {
        return Err(p.unexpected("end of expression"));
    }
    Ok(e)
}

/// Parses a frame-less transform, `transform(col = expr, ...)`, as used by
/// chained steps.
pub fn parse_transform_step(source: &str) -> Result<Vec<(String, Expr)>, ParseError> {
    let mut p = Parser::new(source)?;
    p.skip_newlines();
    if !p.is_call_to("transform") {
        return Err(p.unexpected("`transform(`"));
    }
    p.pos += 2;
    let mut out = Vec::new();
    if !p.eat(&TokenKind::RParen) {
        loop {
            let name = p.ident("a column name")?;
            p.expect(&TokenKind::Eq, "`=`")?;
            out.push((name, p.expr()?));
            if p.eat(&TokenKind::RParen) {
                break;
            }
            p.expect(&TokenKind::Comma, "`,` or `)`")?;
        }
    }
    p.skip_newlines();
    if !p.at_end() {
        return Err(p.unexpected("end of step"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_source() {
        let s = parse_script("", "x.ljk").unwrap();
        assert!(s.is_empty());
        let s = parse_script("# only a comment\n\n", "x.ljk").unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn srcref_spans_physical_lines() {
        let src = "a <- read_csv(\"a.csv\")\n\nb <- transform(a\n   , x = 1)\n";
        let s = parse_script(src, "f.ljk").unwrap();
        assert_eq!(s.statements[0].srcref.to_string(), "f.ljk#1-1");
        assert_eq!(s.statements[1].srcref.to_string(), "f.ljk#3-4");
        assert_eq!(s.statements[1].source, "b <- transform(a\n   , x = 1)");
    }

    #[test]
    fn statement_forms() {
        let src = r#"
spm <- read_csv("supermarkets.csv")
start_log(spm, cellwise(key = "id"))
start_log(spm, logger = simple())
spm <- transform(spm, other.rev = ifelse(is_na(other.rev), 0, other.rev))
Rhat <- mean(spm$staff, na_rm = TRUE) / mean(spm$turnover, na_rm = TRUE)
dump_log(spm, logger = "simple", stop = TRUE)
stop_log(spm, file = "my_custom_log.csv")
write_csv(spm, "out.csv")
"#;
        let s = parse_script(src, "f").unwrap();
        assert_eq!(s.len(), 8);
        assert!(matches!(&s.statements[1].kind,
            StatementKind::StartLog { variable, logger_kind, logger_args }
                if variable == "spm" && logger_kind == "cellwise" && logger_args.get_text("key") == Some("id")));
        assert!(
            matches!(&s.statements[2].kind, StatementKind::StartLog { logger_kind, .. } if logger_kind == "simple")
        );
        assert!(
            matches!(&s.statements[3].kind, StatementKind::Transform { target, source, assignments }
            if target == "spm" && source == "spm" && assignments.len() == 1)
        );
        assert!(
            matches!(&s.statements[4].kind, StatementKind::LetScalar { target, .. } if target == "Rhat")
        );
        assert!(
            matches!(&s.statements[5].kind, StatementKind::DumpLog { logger_kind: Some(k), dump_args, .. }
            if k == "simple" && dump_args.get("stop") == Some(&Value::Boolean(true)))
        );
        assert!(
            matches!(&s.statements[6].kind, StatementKind::StopLog { logger_kind: None, dump_args, .. }
            if dump_args.get_text("file") == Some("my_custom_log.csv"))
        );
        assert!(matches!(
            &s.statements[7].kind,
            StatementKind::WriteCsv { .. }
        ));
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse_script("a <- read_csv(\"x\")\nb <- 1\nc <- (1 +\n", "f").unwrap_err();
        assert_eq!(err.line, 3);
        let err = parse_script("x <- 1\n\ny <- 2 3\n", "f").unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn unknown_statement_form() {
        let err = parse_script("1 + 2", "f").unwrap_err();
        assert!(err.message.contains("unknown statement form"));
        let err = parse_script("mean(x)", "f").unwrap_err();
        assert!(err.message.contains("unknown statement form"));
    }

    #[test]
    fn logger_args_must_be_literals() {
        assert!(parse_script("start_log(x, cellwise(key = id))", "f").is_err());
        assert!(parse_script("start_log(x, cellwise(key = \"id\", key = \"b\"))", "f").is_err());
    }

    #[test]
    fn precedence() {
        let e = parse_expr("1 + 2 * 3 == 7 & !FALSE | NA").unwrap();
        let Expr::Binary {
            op: BinaryOp::Or,
            lhs,
            ..
        } = e
        else {
            panic!("{e:?}")
        };
        let Expr::Binary {
            op: BinaryOp::And,
            lhs: cmp,
            rhs: not,
        } = *lhs
        else {
            panic!()
        };
        assert!(matches!(
            *not,
            Expr::Unary {
                op: UnaryOp::Not,
                ..
            }
        ));
        let Expr::Binary {
            op: BinaryOp::Eq,
            lhs: sum,
            ..
        } = *cmp
        else {
            panic!()
        };
        assert!(matches!(
            *sum,
            Expr::Binary {
                op: BinaryOp::Add,
                ..
            }
        ));
    }

    #[test]
    fn left_associative() {
        let e = parse_expr("8 / 4 / 2").unwrap();
        let Expr::Binary { lhs, .. } = e else {
            panic!()
        };
        assert!(matches!(
            *lhs,
            Expr::Binary {
                op: BinaryOp::Div,
                ..
            }
        ));
    }

    #[test]
    fn negative_literal_folds() {
        assert_eq!(
            parse_expr("-33").unwrap(),
            Expr::Literal(Value::Number(-33.0))
        );
        assert!(matches!(
            parse_expr("-(33)").unwrap(),
            Expr::Unary {
                op: UnaryOp::Neg,
                ..
            }
        ));
    }

    #[test]
    fn ifelse_becomes_conditional() {
        assert!(matches!(
            parse_expr("ifelse(a, 1, 2)").unwrap(),
            Expr::IfElse { .. }
        ));
        assert!(parse_expr("ifelse(a, 1)").is_err());
    }

    #[test]
    fn multiline_let_continues_after_operator() {
        let s = parse_script("x <- 1 +\n  2\ny <- 3", "f").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.statements[0].srcref.last_line, 2);
    }

    #[test]
    fn transform_step() {
        let a = parse_transform_step("transform(ratio = turnover / total.rev)").unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].0, "ratio");
        assert!(parse_transform_step("head(10)").is_err());
    }
}
