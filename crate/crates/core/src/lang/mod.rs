//! Front-end for the guarded-command model language and the PCTL
//! reachability property language. See `docs/grammar.md`.

pub mod ast;
mod lexer;
mod model_parser;
mod parser;
mod property;

use thiserror::Error;

pub use lexer::SourceSpan;
pub use model_parser::parse_model;
pub use property::{parse_property, parse_property_file, PathFormula, PctlQuery, ProbBound};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: SourceSpan, message: String },
    #[error("{span}: duplicate name '{name}'")]
    DuplicateName { name: String, span: SourceSpan },
    #[error("{span}: unknown identifier '{name}'")]
    UnknownIdentifier { name: String, span: SourceSpan },
    #[error("{span}: probability bound {value} is outside [0, 1]")]
    BoundOutOfRange { span: SourceSpan, value: String },
}

impl LangError {
    pub fn span(&self) -> SourceSpan {
        match self {
            LangError::Syntax { span, .. }
            | LangError::DuplicateName { span, .. }
            | LangError::UnknownIdentifier { span, .. }
            | LangError::BoundOutOfRange { span, .. } => *span,
        }
    }
}

/// Model parsing from raw bytes; invalid UTF-8 is a syntax error.
pub fn parse_model_bytes(bytes: &[u8]) -> Result<crate::model::GuardedModel, LangError> {
    let text = std::str::from_utf8(bytes).map_err(|e| invalid_utf8(bytes, e))?;
    parse_model(text)
}

fn invalid_utf8(bytes: &[u8], e: std::str::Utf8Error) -> LangError {
    let at = e.valid_up_to();
    let prefix = &bytes[..at];
    let line = prefix.iter().filter(|b| **b == b'\n').count() + 1;
    let line_start = prefix.iter().rposition(|b| *b == b'\n').map_or(0, |i| i + 1);
    LangError::Syntax {
        span: SourceSpan {
            start: at,
            end: at + e.error_len().unwrap_or(bytes.len() - at),
            line,
            column: at - line_start + 1,
        },
        message: "invalid UTF-8".into(),
    }
}
