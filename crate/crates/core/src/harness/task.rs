use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::lang::{format_outcome, interpret, CheckOutcome, CheckSource, ExecMode};
use crate::store::Store;

/// One input/output pair shown to the model in the prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskExample {
    pub input: String,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalTask {
    pub id: String,
    /// Free-form difficulty label such as `Low` or `Mid`.
    pub level: String,
    pub description: String,
    pub reference_code: String,
    pub test_documents: Vec<u64>,
    pub reference_outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub examples: Vec<TaskExample>,
}

/// Canonical Exact-mode outputs of `code` on each document. Unparseable code
/// yields `error="parse"` everywhere.
pub fn reference_outputs(code: &str, documents: &[u64], store: &Store, mode: ExecMode) -> Vec<String> {
    let ast = match CheckSource::new("", code).parse() {
        Ok(ast) => ast,
        Err(_) => return vec![format_outcome(&CheckOutcome::runtime_error("parse")); documents.len()],
    };
    documents
        .iter()
        .map(|&id| match store.document(id) {
            Some(doc) => format_outcome(&interpret(&ast, doc, store, mode)),
            None => format_outcome(&CheckOutcome::runtime_error(format!("unknown document {id}"))),
        })
        .collect()
}

impl EvalTask {
    fn check(&self, store: &Store) -> Result<(), HarnessError> {
        let invalid = |message: String| HarnessError::InvalidTask {
            task: self.id.clone(),
            message,
        };
        if self.test_documents.len() != self.reference_outputs.len() {
            return Err(invalid(format!(
                "{} test documents but {} reference outputs",
                self.test_documents.len(),
                self.reference_outputs.len()
            )));
        }
        if self.test_documents.is_empty() {
            return Err(invalid("no test documents".into()));
        }
        if let Some(id) = self.test_documents.iter().find(|&&id| store.document(id).is_none()) {
            return Err(invalid(format!("test document {id} is not in the store")));
        }
        if let Err(e) = CheckSource::new(&self.id, &self.reference_code).parse() {
            return Err(invalid(format!("reference code does not parse: {e}")));
        }
        let actual = reference_outputs(&self.reference_code, &self.test_documents, store, ExecMode::Exact);
        for ((doc, expected), got) in self.test_documents.iter().zip(&self.reference_outputs).zip(actual) {
            if *expected != got {
                return Err(HarnessError::SelfConsistency {
                    task: self.id.clone(),
                    document: *doc,
                    expected: expected.clone(),
                    actual: got,
                });
            }
        }
        Ok(())
    }
}

/// Parses a JSON-lines suite and rejects tasks whose reference code does not
/// reproduce its own reference outputs on `store`.
pub fn load_suite(text: &str, store: &Store) -> Result<Vec<EvalTask>, HarnessError> {
    let mut tasks = Vec::new();
    let mut seen = HashSet::new();
    for (ix, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let task: EvalTask = serde_json::from_str(line).map_err(|e| HarnessError::Parse {
            line: ix + 1,
            message: e.to_string(),
        })?;
        if !seen.insert(task.id.clone()) {
            return Err(HarnessError::DuplicateTask(task.id));
        }
        task.check(store)?;
        tasks.push(task);
    }
    Ok(tasks)
}

pub fn load_suite_file(path: &Path, store: &Store) -> Result<Vec<EvalTask>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    load_suite(&text, store)
}
