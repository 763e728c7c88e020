use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Number(f64),
    Str(String),
    True,
    False,
    Na,
    /// `<-`
    Assign,
    LParen,
    RParen,
    Comma,
    /// `=` (named argument)
    Eq,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Bang,
    Amp,
    Pipe,
    Dollar,
    /// Statement separator: a newline outside parentheses, or `;`.
    Newline,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Number(x) => write!(f, "number {x}"),
            TokenKind::Str(s) => write!(f, "string {s:?}"),
            TokenKind::True => f.write_str("TRUE"),
            TokenKind::False => f.write_str("FALSE"),
            TokenKind::Na => f.write_str("NA"),
            TokenKind::Assign => f.write_str("`<-`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::Eq => f.write_str("`=`"),
            TokenKind::EqEq => f.write_str("`==`"),
            TokenKind::NotEq => f.write_str("`!=`"),
            TokenKind::Lt => f.write_str("`<`"),
            TokenKind::Le => f.write_str("`<=`"),
            TokenKind::Gt => f.write_str("`>`"),
            TokenKind::Ge => f.write_str("`>=`"),
            TokenKind::Plus => f.write_str("`+`"),
            TokenKind::Minus => f.write_str("`-`"),
            TokenKind::Star => f.write_str("`*`"),
            TokenKind::Slash => f.write_str("`/`"),
            TokenKind::Bang => f.write_str("`!`"),
            TokenKind::Amp => f.write_str("`&`"),
            TokenKind::Pipe => f.write_str("`|`"),
            TokenKind::Dollar => f.write_str("`$`"),
            TokenKind::Newline => f.write_str("end of line"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
    /// Byte range in the source.
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}, column {column}: {message}")]
pub struct LexError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

pub(crate) fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '.'
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    line_start: usize,
    depth: usize,
    tokens: Vec<Token>,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.line_start = self.pos;
        }
        Some(c)
    }

    fn column_of(&self, pos: usize) -> usize {
        self.src[self.line_start..pos].chars().count() + 1
    }

    fn error(&self, pos: usize, message: impl Into<String>) -> LexError {
        LexError {
            line: self.line,
            column: self.column_of(pos),
            message: message.into(),
        }
    }

    fn push(&mut self, kind: TokenKind, start: usize, line: usize, column: usize) {
        self.tokens.push(Token {
            kind,
            line,
            column,
            start,
            end: self.pos,
        });
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        while let Some(c) = self.peek() {
            let start = self.pos;
            let line = self.line;
            let column = self.column_of(start);
            match c {
                '#' => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                '\n' | ';' => {
                    self.bump();
                    if self.depth == 0
                        && !matches!(
                            self.tokens.last().map(|t| &t.kind),
                            None | Some(TokenKind::Newline)
                        )
                    {
                        self.push(TokenKind::Newline, start, line, column);
                    }
                }
                c if c.is_whitespace() => {
                    self.bump();
                }
                '(' => {
                    self.bump();
                    self.depth += 1;
                    self.push(TokenKind::LParen, start, line, column);
                }
                ')' => {
                    self.bump();
                    self.depth = self.depth.saturating_sub(1);
                    self.push(TokenKind::RParen, start, line, column);
                }
                '"' | '\'' => {
                    let s = self.string(c)?;
                    self.push(TokenKind::Str(s), start, line, column);
                }
                '`' => {
                    self.bump();
                    let body_start = self.pos;
                    while self.peek().is_some_and(|c| c != '`' && c != '\n') {
                        self.bump();
                    }
                    if self.peek() != Some('`') {
                        return Err(self.error(start, "unterminated backquoted name"));
                    }
                    let name = self.src[body_start..self.pos].to_string();
                    self.bump();
                    if name.is_empty() {
                        return Err(self.error(start, "empty backquoted name"));
                    }
                    self.push(TokenKind::Ident(name), start, line, column);
                }
                c if c.is_ascii_digit()
                    || (c == '.' && self.peek2().is_some_and(|d| d.is_ascii_digit())) =>
                {
                    let x = self.number()?;
                    self.push(TokenKind::Number(x), start, line, column);
                }
                c if is_ident_start(c) || c == '.' => {
                    while self.peek().is_some_and(is_ident_continue) {
                        self.bump();
                    }
                    let word = &self.src[start..self.pos];
                    let kind = match word {
                        "TRUE" => TokenKind::True,
                        "FALSE" => TokenKind::False,
                        "NA" => TokenKind::Na,
                        _ => TokenKind::Ident(word.to_string()),
                    };
                    self.push(kind, start, line, column);
                }
                _ => {
                    self.bump();
                    let two = self.peek();
                    let kind = match (c, two) {
                        ('<', Some('-')) => {
                            self.bump();
                            TokenKind::Assign
                        }
                        ('<', Some('=')) => {
                            self.bump();
                            TokenKind::Le
                        }
                        ('>', Some('=')) => {
                            self.bump();
                            TokenKind::Ge
                        }
                        ('=', Some('=')) => {
                            self.bump();
                            TokenKind::EqEq
                        }
                        ('!', Some('=')) => {
                            self.bump();
                            TokenKind::NotEq
                        }
                        ('<', _) => TokenKind::Lt,
                        ('>', _) => TokenKind::Gt,
                        ('=', _) => TokenKind::Eq,
                        ('!', _) => TokenKind::Bang,
                        (',', _) => TokenKind::Comma,
                        ('+', _) => TokenKind::Plus,
                        ('-', _) => TokenKind::Minus,
                        ('*', _) => TokenKind::Star,
                        ('/', _) => TokenKind::Slash,
                        ('&', _) => TokenKind::Amp,
                        ('|', _) => TokenKind::Pipe,
                        ('$', _) => TokenKind::Dollar,
                        _ => {
                            return Err(LexError {
                                line,
                                column,
                                message: format!("illegal character `{c}`"),
                            })
                        }
                    };
                    self.push(kind, start, line, column);
                }
            }
        }
        Ok(self.tokens)
    }

    fn string(&mut self, quote: char) -> Result<String, LexError> {
        let start = self.pos;
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(start, "unterminated string")),
                Some(c) if c == quote => return Ok(out),
                Some('\\') => match self.bump() {
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some('r') => out.push('\r'),
                    Some(c @ ('\\' | '"' | '\'')) => out.push(c),
                    _ => return Err(self.error(self.pos, "unknown escape in string")),
                },
                Some(c) => out.push(c),
            }
        }
    }

    fn number(&mut self) -> Result<f64, LexError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        if self.peek() == Some('.') {
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = (self.pos, self.line, self.line_start);
            self.bump();
            if matches!(self.peek(), Some('+' | '-')) {
                self.bump();
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.bump();
                }
            } else {
                (self.pos, self.line, self.line_start) = save;
            }
        }
        let text = &self.src[start..self.pos];
        match text.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(self.error(start, format!("number `{text}` out of range"))),
        }
    }
}

/// Splits source text into tokens. Newlines inside parentheses are dropped so
/// a call may span several lines; a `#` comments out the rest of its line.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    Lexer {
        src: source,
        pos: 0,
        line: 1,
        line_start: 0,
        depth: 0,
        tokens: Vec::new(),
    }
    .run()
}
