use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::lang::{format_outcome, interpret, validate_static, CheckOutcome, CheckSource, ExecMode};
use crate::store::Store;

/// A document paired with the canonical output of a check on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckExample {
    pub description: String,
    pub document_id: u64,
    pub expected_output: String,
}

/// Picks `n` distinct documents, alternating between documents the check
/// applies to and documents it rejects while both kinds remain, and records
/// the Exact-mode output for each.
pub fn attach_examples(check: &CheckSource, store: &Store, n: usize) -> Result<Vec<CheckExample>, DatasetError> {
    let ast = check.parse()?;
    validate_static(&ast, &store.schema())?;
    let available = store.documents().len();
    if available < n {
        return Err(DatasetError::InsufficientDocuments { needed: n, available });
    }
    let mut applicable = Vec::new();
    let mut rejected = Vec::new();
    for doc in store.documents() {
        let outcome = interpret(&ast, doc, store, ExecMode::Exact);
        let bucket = match outcome {
            CheckOutcome::Triggered { .. } => &mut applicable,
            _ => &mut rejected,
        };
        bucket.push((doc.id, format_outcome(&outcome)));
    }
    let mut a = applicable.into_iter();
    let mut r = rejected.into_iter();
    let mut picked = Vec::with_capacity(n);
    while picked.len() < n {
        let next = if picked.len() % 2 == 0 {
            a.next().or_else(|| r.next())
        } else {
            r.next().or_else(|| a.next())
        };
        match next {
            Some(p) => picked.push(p),
            None => break,
        }
    }
    Ok(picked
        .into_iter()
        .map(|(document_id, expected_output)| CheckExample {
            description: ast.name.clone(),
            document_id,
            expected_output,
        })
        .collect())
}
