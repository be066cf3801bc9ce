//! On-disk JSON bundle: every reference is spelled by the target's unique
//! name, code or id.

use chrono::NaiveDate;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::model::{Assessment, IssueWindow};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bundle {
    #[serde(default)]
    pub countries: Vec<CountryEntry>,
    #[serde(default)]
    pub categories: Vec<NameEntry>,
    #[serde(default)]
    pub doc_types: Vec<DocTypeEntry>,
    #[serde(default)]
    pub elements: Vec<NameEntry>,
    #[serde(default)]
    pub documents: Vec<DocumentEntry>,
    #[serde(default)]
    pub element_evaluations: Vec<EvaluationEntry>,
    #[serde(default)]
    pub barcodes: Vec<BarcodeEntry>,
    #[serde(default)]
    pub element_fields: Vec<ElementFieldEntry>,
    #[serde(default)]
    pub visa_requirement_information: Vec<VisaInfoEntry>,
    #[serde(default)]
    pub visa_requirements: Vec<VisaRequirementEntry>,
    #[serde(default)]
    pub specifications: Vec<SpecificationEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountryEntry {
    pub code: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NameEntry {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocTypeEntry {
    pub name: String,
    pub category: String,
    pub issuing_country: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentEntry {
    pub id: u64,
    pub doc_type: String,
    pub issuing_country: String,
    #[serde(default)]
    pub issuing_date: Option<NaiveDate>,
    pub document_number: String,
    pub assessment: Assessment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u64>,
    pub document: u64,
    pub element: String,
    pub part: String,
    pub category: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarcodeEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u64>,
    pub document: u64,
    pub payload: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementFieldEntry {
    pub id: u64,
    pub field_type: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisaInfoEntry {
    pub identifier: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisaRequirementEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u64>,
    pub country_of_entry: String,
    pub information: u64,
}

fn default_element() -> String {
    "Material".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecificationEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u64>,
    pub doc_type: String,
    #[serde(default = "default_element")]
    pub element: String,
    pub expected_parts: IndexMap<String, String>,
    #[serde(default)]
    pub issue_window: Option<IssueWindow>,
}
