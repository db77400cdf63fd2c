//! Lexer and recursive-descent parser for `.qbr` programs.
//!
//! The accepted language is the restricted QBorrow grammar of gate
//! statements and counted loops over qubit registers.

pub mod ast;
mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

pub use ast::{same_structure, Expr, ProgramAst, Reg, Stmt, StmtKind};
pub use lexer::{tokenize, Keyword, Token, TokenKind};
pub use parser::parse;

/// 1-based line and column of a character in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("{at}: unexpected character '{found}'")]
    UnexpectedChar { at: Location, found: char },
    #[error("{at}: unterminated block comment")]
    UnterminatedComment { at: Location },
    #[error("{at}: integer literal {literal} does not fit in 64 bits")]
    IntegerOverflow { at: Location, literal: String },
    #[error("{at}: expected {}, found {found}", .expected.join(" or "))]
    Parse {
        at: Location,
        expected: Vec<String>,
        found: String,
    },
}

impl FrontendError {
    pub fn location(&self) -> Location {
        match self {
            FrontendError::UnexpectedChar { at, .. }
            | FrontendError::UnterminatedComment { at }
            | FrontendError::IntegerOverflow { at, .. }
            | FrontendError::Parse { at, .. } => *at,
        }
    }
}

/// Tokenizes and parses `source` in one step.
pub fn parse_program(source: &str) -> Result<ProgramAst, FrontendError> {
    parse(&tokenize(source)?)
}
