use chrono::NaiveDate;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

/// Expert assessment of a document. Serialized with the German labels the
/// source system stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Assessment {
    #[serde(rename = "Fälschung")]
    Forged,
    #[serde(rename = "Echt")]
    Genuine,
    #[serde(rename = "Unbekannt")]
    Unknown,
}

impl Assessment {
    pub fn label(self) -> &'static str {
        match self {
            Assessment::Forged => "Fälschung",
            Assessment::Genuine => "Echt",
            Assessment::Unknown => "Unbekannt",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Country {
    pub code: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentCategory {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentType {
    pub name: String,
    pub category: usize,
    pub issuing_country: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentElement {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentRecord {
    pub id: u64,
    pub doc_type: usize,
    pub issuing_country: usize,
    pub issuing_date: Option<NaiveDate>,
    pub document_number: String,
    pub assessment: Assessment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementEvaluation {
    pub id: u64,
    pub document: usize,
    pub element: usize,
    pub part: String,
    pub category: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Barcode {
    pub id: u64,
    pub document: usize,
    pub payload: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementField {
    pub id: u64,
    pub field_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisaRequirementInformation {
    pub identifier: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisaRequirement {
    pub id: u64,
    pub country_of_entry: usize,
    pub information: usize,
}

/// Inclusive validity window for issuing dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssueWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl IssueWindow {
    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

/// What a document type is expected to look like: one category per part of
/// one element, plus an optional issuing window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentSpecification {
    pub id: u64,
    pub doc_type: usize,
    pub element: usize,
    pub expected_parts: IndexMap<String, String>,
    pub issue_window: Option<IssueWindow>,
}
