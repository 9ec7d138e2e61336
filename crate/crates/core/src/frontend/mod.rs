//! Lexing and parsing of `.mesh` source text.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod token;

pub use ast::Program;
pub use lexer::{tokenize, LexError};
pub use parser::{parse, ParseError};
pub use token::{Pos, Token, TokenKind};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SyntaxError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl SyntaxError {
    pub fn pos(&self) -> Pos {
        match self {
            SyntaxError::Lex(e) => e.pos,
            SyntaxError::Parse(e) => e.pos,
        }
    }

    pub fn rule(&self) -> &'static str {
        match self {
            SyntaxError::Lex(_) => "LexError",
            SyntaxError::Parse(_) => "ParseError",
        }
    }
}

/// Tokenize and parse in one step.
pub fn parse_source(source: &str) -> Result<Program, SyntaxError> {
    let tokens = tokenize(source)?;
    Ok(parse(&tokens)?)
}
