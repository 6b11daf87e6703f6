use std::fmt;

use super::ast::Position;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unbalanced braces: {0}")]
    UnbalancedBraces(String),
    #[error("duplicate shape label {0}")]
    DuplicateShape(String),
    #[error("unknown prefix '{0}:'")]
    UnknownPrefix(String),
    #[error("unsupported feature: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, pos: Position) -> Self {
        Self {
            kind,
            line: pos.line,
            column: pos.column,
        }
    }

    pub fn position(&self) -> Position {
        Position {
            line: self.line,
            column: self.column,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.kind)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown prefix '{prefix}:' in '{term}'")]
pub struct UnknownPrefix {
    pub prefix: String,
    pub term: String,
}
