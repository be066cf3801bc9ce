//! The plausibility check language: lexer, parser, printer, static
//! validator and interpreter.

mod ast;
mod error;
mod interp;
mod lexer;
mod linfit;
mod outcome;
mod parser;
mod printer;
mod relax;
mod span;
mod validate;

pub use ast::*;
pub use error::LangError;
pub use interp::{interpret, interpret_with_budget, STEP_BUDGET};
pub use lexer::{tokenize, Tok, Token};
pub use linfit::{linear_fit, FitError, LinearFit};
pub use outcome::{format_outcome, CheckOutcome, ExecMode};
pub use parser::{parse_check, parse_source, DOCUMENT_VAR};
pub use printer::{pretty_print, quote};
pub use relax::relax_guards;
pub use span::{Loc, Span};
pub use validate::validate_static;

/// A named check source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckSource {
    pub name: String,
    pub text: String,
}

impl CheckSource {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            text: text.into(),
        }
    }

    pub fn parse(&self) -> Result<CheckAst, LangError> {
        if self.text.trim().is_empty() {
            return Err(LangError::Syntax {
                expected: "`check`".into(),
                found: "empty source".into(),
                span: Span::new(1, 1),
            });
        }
        parse_source(&self.text)
    }
}
