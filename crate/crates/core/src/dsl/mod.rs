//! The pipeline scripting language: lexer, parser, printer and evaluator.

mod ast;
mod eval;
mod exec;
mod lexer;
mod parser;
mod printer;

pub use ast::{Args, BinaryOp, Expr, Script, SrcRef, Statement, StatementKind, UnaryOp};
pub use eval::{eval_expr, Binding, Env, EvalError, Evaluated, BUILTINS};
pub use exec::{apply_transform, exec_statement, ExecError, ExecErrorKind};
pub use lexer::{tokenize, LexError, Token, TokenKind};
pub use parser::{parse_expr, parse_script, parse_transform_step, ParseError};
