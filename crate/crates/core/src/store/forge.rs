//! Synthetic forgery injection and specification diffing.

use std::fmt;

use serde::Serialize;

use super::query::QueryError;
use super::{Collection, DocumentSpecification, Store};
use crate::value::iexact;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "matches specification")]
    Matches,
    #[serde(rename = "deviating")]
    Deviating,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Matches => "matches specification",
            Verdict::Deviating => "deviating",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartDiff {
    pub part: String,
    pub expected: String,
    pub observed: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpecReport {
    pub document_id: u64,
    pub parts: Vec<PartDiff>,
    pub window: Verdict,
}

impl SpecReport {
    pub fn deviating_parts(&self) -> impl Iterator<Item = &PartDiff> {
        self.parts.iter().filter(|p| p.verdict == Verdict::Deviating)
    }
}

fn missing_document(id: u64) -> QueryError {
    QueryError::NotFound {
        collection: Collection::Documents,
        detail: format!("id {id}"),
    }
}

/// Returns a copy of `store` with one element evaluation's category replaced.
pub fn inject_change(
    store: &Store,
    document_id: u64,
    element: &str,
    part: &str,
    new_category: &str,
) -> Result<Store, QueryError> {
    let doc = store
        .document_index(document_id)
        .ok_or_else(|| missing_document(document_id))?;
    let target = store
        .evaluations
        .iter()
        .position(|e| e.document == doc && store.element_name(e.element) == element && e.part == part)
        .ok_or_else(|| QueryError::NotFound {
            collection: Collection::ElementEvaluations,
            detail: format!("({document_id}, {element}, {part})"),
        })?;
    let mut forged = store.clone();
    forged.evaluations[target].category = new_category.to_string();
    Ok(forged)
}

/// Compares a document's observations against a specification, part by part.
pub fn evaluate_against_spec(
    store: &Store,
    document_id: u64,
    spec: &DocumentSpecification,
) -> Result<SpecReport, QueryError> {
    let doc_ix = store
        .document_index(document_id)
        .ok_or_else(|| missing_document(document_id))?;
    let doc = &store.documents[doc_ix];
    let parts = spec
        .expected_parts
        .iter()
        .map(|(part, expected)| {
            let observed = store
                .evaluations
                .iter()
                .find(|e| e.document == doc_ix && e.element == spec.element && &e.part == part)
                .map(|e| e.category.clone());
            let verdict = match &observed {
                Some(o) if iexact(o, expected) => Verdict::Matches,
                _ => Verdict::Deviating,
            };
            PartDiff {
                part: part.clone(),
                expected: expected.clone(),
                observed: observed.unwrap_or_default(),
                verdict,
            }
        })
        .collect();
    let window = match (spec.issue_window, doc.issuing_date) {
        (Some(w), Some(d)) if !w.contains(d) => Verdict::Deviating,
        _ => Verdict::Matches,
    };
    Ok(SpecReport {
        document_id,
        parts,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::load_store;

    const FIXTURE: &str = r#"{
        "countries": [{"code": "DE", "name": "Deutschland"}],
        "categories": [{"name": "Reisepass"}],
        "doc_types": [{"name": "Reisepass", "category": "Reisepass", "issuing_country": "DE"}],
        "elements": [{"name": "Material"}],
        "documents": [{"id": 8713426, "doc_type": "Reisepass", "issuing_country": "DE",
                       "issuing_date": "2020-05-01", "document_number": "X12345", "assessment": "Fälschung"}],
        "element_evaluations": [
            {"document": 8713426, "element": "Material", "part": "Cover", "category": "Papier"},
            {"document": 8713426, "element": "Material", "part": "Page 1", "category": "Papier"}
        ],
        "specifications": [{"doc_type": "Reisepass", "expected_parts": {"Cover": "Papier", "Page 1": "papier", "Page 2": "Papier"},
                            "issue_window": {"start": "2008-01-01", "end": "2012-12-31"}}]
    }"#;

    #[test]
    fn injection_leaves_input_untouched() {
        let store = load_store(FIXTURE).unwrap();
        let before = store.content_hash();
        let forged = inject_change(&store, 8713426, "Material", "Cover", "Kunststoff").unwrap();
        assert_eq!(store.content_hash(), before);
        assert_eq!(forged.evaluations()[0].category, "Kunststoff");
        let same = inject_change(&store, 8713426, "Material", "Cover", "Papier").unwrap();
        assert_eq!(same.content_hash(), before);
        assert!(inject_change(&store, 8713426, "Material", "Page 99", "x").is_err());
        assert!(inject_change(&store, 1, "Material", "Cover", "x").is_err());
    }

    #[test]
    fn spec_diff_and_window() {
        let store = load_store(FIXTURE).unwrap();
        let spec = store.specifications()[0].clone();
        let report = evaluate_against_spec(&store, 8713426, &spec).unwrap();
        let verdicts: Vec<_> = report.parts.iter().map(|p| p.verdict).collect();
        assert_eq!(verdicts, [Verdict::Matches, Verdict::Matches, Verdict::Deviating]);
        assert_eq!(report.parts[2].observed, "");
        assert_eq!(report.window, Verdict::Deviating);
    }
}
