//! Reader errors. Any input maps to a program or to exactly one of these.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Illegal character or malformed literal.
    Lex,
    /// A well-formed token in a position the grammar does not allow.
    UnexpectedToken,
    /// Unterminated quoted atom or block comment.
    Unterminated,
    /// An atom used as an operator it is not, or an operator clash.
    Operator,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParseErrorKind::Lex => "lex",
            ParseErrorKind::UnexpectedToken => "unexpected-token",
            ParseErrorKind::Unterminated => "unterminated",
            ParseErrorKind::Operator => "operator",
        };
        f.write_str(s)
    }
}

/// A reader failure with its position in the input (1-based line/column).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, kind: ParseErrorKind, message: impl Into<String>) -> Self {
        ParseError { line, column, kind, message: message.into() }
    }
}
