//! Fine-tuning dataset preparation: corpus chunks, instruction records,
//! synthetic checks, check examples and document-property rows.

mod augment;
mod chunk;
mod examples;
mod instruct;
mod properties;
mod records;
mod tokens;

use std::path::Path;

use plauscheck_llm::LlmError;
use thiserror::Error;

use crate::lang::LangError;

pub use augment::{augment_checks, augment_prompt, AugmentReport, AUGMENT_SYSTEM_PROMPT, MAX_ATTEMPTS};
pub use chunk::{segment_corpus, segment_text, Chunk, ChunkManifestEntry};
pub use examples::{attach_examples, CheckExample};
pub use instruct::{build_instruction_records, instruct_prompt, parse_instruction, INSTRUCT_SYSTEM_PROMPT};
pub use properties::{document_property_records, PropertyRecord};
pub use records::{emit_records, read_records, InstructionRecord};
pub use tokens::{count_tokens, TokenCounter, TOKENIZER_CMD_ENV};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("unknown token counter `{0}`")]
    UnknownCounter(String),
    #[error("token counter failed: {0}")]
    Counter(String),
    #[error("backend failed on item {chunk_id}: {source}")]
    Backend { chunk_id: usize, source: LlmError },
    #[error("need {needed} documents, store has {available}")]
    InsufficientDocuments { needed: usize, available: usize },
    #[error("{file}:{line}: a single character exceeds {max_tokens} tokens")]
    ChunkTooSmall {
        file: String,
        line: usize,
        max_tokens: usize,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Lang(#[from] LangError),
}

impl DatasetError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        DatasetError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}
