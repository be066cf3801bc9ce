use thiserror::Error;

use super::span::Span;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LangError {
    #[error("lex error at {span}: {message}")]
    Lex { message: String, span: Span },
    #[error("syntax error at {span}: expected {expected}, found {found}")]
    Syntax {
        expected: String,
        found: String,
        span: Span,
    },
    #[error("structure error at {span}: {message}")]
    Structure { message: String, span: Span },
    #[error("unknown collection `{name}` at {span}")]
    UnknownCollection { name: String, span: Span },
    #[error("unknown field `{path}` at {span}")]
    UnknownField { path: String, span: Span },
}

impl LangError {
    pub fn span(&self) -> Span {
        match self {
            LangError::Lex { span, .. }
            | LangError::Syntax { span, .. }
            | LangError::Structure { span, .. }
            | LangError::UnknownCollection { span, .. }
            | LangError::UnknownField { span, .. } => *span,
        }
    }

    pub(crate) fn structure(message: impl Into<String>, span: Span) -> Self {
        LangError::Structure {
            message: message.into(),
            span,
        }
    }
}
