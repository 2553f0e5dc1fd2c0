//! MiniJ frontend: lexing, parsing, name resolution, static types and
//! pretty-printing.
//!
//! MiniJ is a small Java subset: classes (optionally nested) with fields,
//! methods and constructors, plus free top-level methods; statements
//! `if`/`else`, `for`, `while`, `return`, `throw new C(..)`, local
//! declarations, assignments, expression statements and nested blocks;
//! expressions over `int`, `double`, `boolean`, `String`, class types and
//! `Optional<T>` (`Optional.of`, `Optional.ofNullable`, `.get()`,
//! `.orElse(d)`). There are no arrays, generics beyond `Optional`,
//! inheritance, interfaces or exceptions handling.
//!
//! ```text
//! file     := (class | method)*
//! class    := "class" ID "{" member* "}"
//! member   := class | mods (field | method | ctor)
//! field    := type ID ("=" expr)? ";"
//! method   := type ID "(" params ")" block
//! ctor     := ID "(" params ")" block
//! stmt     := block | local ";" | simple ";" | "return" expr? ";"
//!           | "throw" "new" ID "(" args ")" ";"
//!           | "if" "(" expr ")" stmt ("else" stmt)?
//!           | "while" "(" expr ")" stmt
//!           | "for" "(" (local | simple) ";" expr ";" simple ")" stmt
//! simple   := lvalue "=" expr | expr
//! ```

pub mod ast;
pub mod builtins;
pub mod canon;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod resolve;
pub mod types;

use std::fmt;

use thiserror::Error;

pub use ast::{Ast, AstNode, AttrKey, AttrValue, Attrs, Literal, NodeId, NodeKind, Op, Span, Type};

/// One source file of a submission.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    pub path: String,
    pub text: String,
}

impl SourceUnit {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> SourceUnit {
        SourceUnit {
            path: path.into(),
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}{line}:{col}: syntax error: {message}", path = path_prefix(.path))]
pub struct SyntaxError {
    pub path: Option<String>,
    pub line: u32,
    pub col: u32,
    pub message: String,
}

fn path_prefix(path: &Option<String>) -> String {
    path.as_ref().map(|p| format!("{p}:")).unwrap_or_default()
}

impl SyntaxError {
    pub fn new(line: u32, col: u32, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            path: None,
            line,
            col,
            message: message.into(),
        }
    }

    pub fn at(span: Span, message: impl Into<String>) -> SyntaxError {
        SyntaxError::new(span.line, span.col, message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{location}: resolution error: {message}")]
pub struct ResolutionError {
    pub location: Location,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Location {
    pub path: Option<String>,
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.path {
            write!(f, "{p}:")?;
        }
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
}

/// Parses one unit into a fresh arena (`Program` root with one `File`).
pub fn parse(unit: &SourceUnit) -> Result<Ast, SyntaxError> {
    parse_units(std::slice::from_ref(unit))
}

/// Parses several files of one submission into a single arena.
pub fn parse_units(units: &[SourceUnit]) -> Result<Ast, SyntaxError> {
    let mut ast = Ast::new();
    for unit in units {
        parser::parse_into(&mut ast, unit).map_err(|mut e| {
            e.path = Some(unit.path.clone());
            e
        })?;
    }
    Ok(ast)
}

pub use resolve::resolve;

/// Parse and resolve in one go.
pub fn load(units: &[SourceUnit]) -> Result<Ast, FrontendError> {
    let mut ast = parse_units(units)?;
    resolve(&mut ast)?;
    Ok(ast)
}

/// Convenience for single-file programs, mostly used by tests.
pub fn load_str(text: &str) -> Result<Ast, FrontendError> {
    load(&[SourceUnit::new("Main.minij", text)])
}
