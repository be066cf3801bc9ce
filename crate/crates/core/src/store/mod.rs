//! Immutable in-memory document store with ORM-style queries.
//!
//! A [`Store`] is loaded once from a JSON [`Bundle`], indexes every
//! collection by its unique key and is never mutated afterwards;
//! [`inject_change`] returns a modified copy.

mod bundle;
mod forge;
mod model;
mod query;
mod schema;

use std::collections::HashMap;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::value::{RowRef, Value};

pub use bundle::*;
pub use forge::{evaluate_against_spec, inject_change, PartDiff, SpecReport, Verdict};
pub use model::*;
pub use query::{
    query_count, query_exclude, query_filter, query_get, PredOp, Predicate, QueryError,
};
pub use schema::{Collection, FieldDef, FieldKind, Schema};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StoreError {
    #[error("malformed store bundle: {0}")]
    Parse(String),
    #[error("{record}: `{path}` references unknown {target}")]
    DanglingReference {
        record: String,
        path: String,
        target: String,
    },
    #[error("duplicate {collection} key {key}")]
    Duplicate { collection: Collection, key: String },
    #[error("{record}: {message}")]
    InvalidRecord { record: String, message: String },
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Store {
    pub(crate) countries: Vec<Country>,
    pub(crate) categories: Vec<DocumentCategory>,
    pub(crate) doc_types: Vec<DocumentType>,
    pub(crate) elements: Vec<DocumentElement>,
    pub(crate) documents: Vec<DocumentRecord>,
    pub(crate) evaluations: Vec<ElementEvaluation>,
    pub(crate) barcodes: Vec<Barcode>,
    pub(crate) element_fields: Vec<ElementField>,
    pub(crate) visa_info: Vec<VisaRequirementInformation>,
    pub(crate) visa_requirements: Vec<VisaRequirement>,
    pub(crate) specifications: Vec<DocumentSpecification>,
    document_index: HashMap<u64, usize>,
}

/// Parses a bundle and builds a store; see [`Store::from_bundle`].
pub fn load_store(json: &str) -> Result<Store, StoreError> {
    let bundle: Bundle = serde_json::from_str(json).map_err(|e| StoreError::Parse(e.to_string()))?;
    Store::from_bundle(&bundle)
}

pub fn load_store_file(path: &Path) -> Result<Store, StoreError> {
    let text = std::fs::read_to_string(path).map_err(|e| StoreError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    load_store(&text)
}

fn unique_index<K: std::hash::Hash + Eq + ToString>(
    collection: Collection,
    keys: impl Iterator<Item = K>,
) -> Result<HashMap<K, usize>, StoreError> {
    let mut map = HashMap::new();
    for (i, k) in keys.enumerate() {
        let key_str = k.to_string();
        if map.insert(k, i).is_some() {
            return Err(StoreError::Duplicate {
                collection,
                key: key_str,
            });
        }
    }
    Ok(map)
}

fn resolve<K: std::hash::Hash + Eq + std::fmt::Display + ?Sized>(
    index: &HashMap<&K, usize>,
    key: &K,
    record: impl FnOnce() -> String,
    path: &str,
    target: Collection,
) -> Result<usize, StoreError> {
    index
        .get(key)
        .copied()
        .ok_or_else(|| StoreError::DanglingReference {
            record: record(),
            path: path.to_string(),
            target: format!("{target} `{key}`"),
        })
}

fn implicit_ids(
    collection: Collection,
    ids: impl Iterator<Item = Option<u64>>,
) -> Result<Vec<u64>, StoreError> {
    let ids: Vec<u64> = ids
        .enumerate()
        .map(|(i, id)| id.unwrap_or(i as u64 + 1))
        .collect();
    unique_index(collection, ids.iter().copied())?;
    Ok(ids)
}

impl Store {
    /// Validates the bundle's invariants and resolves every reference.
    pub fn from_bundle(b: &Bundle) -> Result<Self, StoreError> {
        use Collection as C;

        for c in &b.countries {
            if c.code.chars().count() != 2 || !c.code.chars().all(|ch| ch.is_ascii_uppercase()) {
                return Err(StoreError::InvalidRecord {
                    record: format!("country `{}`", c.code),
                    message: "code must be exactly two letters A-Z".into(),
                });
            }
        }
        let country_ix = unique_index(C::Countries, b.countries.iter().map(|c| c.code.as_str()))?;
        let category_ix =
            unique_index(C::DocumentCategories, b.categories.iter().map(|c| c.name.as_str()))?;
        let element_ix = unique_index(C::DocumentElements, b.elements.iter().map(|e| e.name.as_str()))?;
        let type_ix = unique_index(C::DocumentTypes, b.doc_types.iter().map(|t| t.name.as_str()))?;
        let doc_ix = unique_index(C::Documents, b.documents.iter().map(|d| d.id))?;
        let info_ix = unique_index(
            C::VisaRequirementInformation,
            b.visa_requirement_information.iter().map(|v| v.identifier),
        )?;
        unique_index(C::ElementFields, b.element_fields.iter().map(|f| f.id))?;

        let doc_ref_ix: HashMap<&u64, usize> = doc_ix.iter().map(|(k, v)| (k, *v)).collect();
        let info_ref_ix: HashMap<&u64, usize> = info_ix.iter().map(|(k, v)| (k, *v)).collect();

        let mut doc_types = Vec::with_capacity(b.doc_types.len());
        for t in &b.doc_types {
            let rec = || format!("doc_type `{}`", t.name);
            doc_types.push(DocumentType {
                name: t.name.clone(),
                category: resolve(&category_ix, t.category.as_str(), rec, "category", C::DocumentCategories)?,
                issuing_country: resolve(&country_ix, t.issuing_country.as_str(), rec, "issuing_country", C::Countries)?,
            });
        }

        let mut documents = Vec::with_capacity(b.documents.len());
        for d in &b.documents {
            if d.id == 0 {
                return Err(StoreError::InvalidRecord {
                    record: "document 0".into(),
                    message: "id must be positive".into(),
                });
            }
            let rec = || format!("document {}", d.id);
            documents.push(DocumentRecord {
                id: d.id,
                doc_type: resolve(&type_ix, d.doc_type.as_str(), rec, "doc_type", C::DocumentTypes)?,
                issuing_country: resolve(&country_ix, d.issuing_country.as_str(), rec, "issuing_country", C::Countries)?,
                issuing_date: d.issuing_date,
                document_number: d.document_number.clone(),
                assessment: d.assessment,
            });
        }

        let eval_ids = implicit_ids(C::ElementEvaluations, b.element_evaluations.iter().map(|e| e.id))?;
        let mut evaluations = Vec::with_capacity(b.element_evaluations.len());
        let mut seen_parts = HashMap::new();
        for (e, id) in b.element_evaluations.iter().zip(eval_ids) {
            let rec = || format!("element_evaluation {id}");
            let document = resolve(&doc_ref_ix, &e.document, rec, "document", C::Documents)?;
            let element = resolve(&element_ix, e.element.as_str(), rec, "element", C::DocumentElements)?;
            if seen_parts
                .insert((document, element, e.part.clone()), id)
                .is_some()
            {
                return Err(StoreError::Duplicate {
                    collection: C::ElementEvaluations,
                    key: format!("({}, {}, {})", e.document, e.element, e.part),
                });
            }
            evaluations.push(ElementEvaluation {
                id,
                document,
                element,
                part: e.part.clone(),
                category: e.category.clone(),
            });
        }

        let barcode_ids = implicit_ids(C::Barcodes, b.barcodes.iter().map(|x| x.id))?;
        let mut barcodes = Vec::with_capacity(b.barcodes.len());
        for (x, id) in b.barcodes.iter().zip(barcode_ids) {
            let rec = || format!("barcode {id}");
            barcodes.push(Barcode {
                id,
                document: resolve(&doc_ref_ix, &x.document, rec, "document", C::Documents)?,
                payload: x.payload.clone(),
            });
        }

        let visa_ids = implicit_ids(C::VisaRequirements, b.visa_requirements.iter().map(|v| v.id))?;
        let mut visa_requirements = Vec::with_capacity(b.visa_requirements.len());
        for (v, id) in b.visa_requirements.iter().zip(visa_ids) {
            let rec = || format!("visa_requirement {id}");
            visa_requirements.push(VisaRequirement {
                id,
                country_of_entry: resolve(&country_ix, v.country_of_entry.as_str(), rec, "country_of_entry", C::Countries)?,
                information: resolve(&info_ref_ix, &v.information, rec, "information", C::VisaRequirementInformation)?,
            });
        }

        let spec_ids = implicit_ids(C::Specifications, b.specifications.iter().map(|s| s.id))?;
        let mut specifications = Vec::with_capacity(b.specifications.len());
        for (s, id) in b.specifications.iter().zip(spec_ids) {
            let rec = || format!("specification {id}");
            if let Some(w) = s.issue_window {
                if w.start > w.end {
                    return Err(StoreError::InvalidRecord {
                        record: rec(),
                        message: "issue_window start is after end".into(),
                    });
                }
            }
            specifications.push(DocumentSpecification {
                id,
                doc_type: resolve(&type_ix, s.doc_type.as_str(), rec, "doc_type", C::DocumentTypes)?,
                element: resolve(&element_ix, s.element.as_str(), rec, "element", C::DocumentElements)?,
                expected_parts: s.expected_parts.clone(),
                issue_window: s.issue_window,
            });
        }

        Ok(Store {
            countries: b
                .countries
                .iter()
                .map(|c| Country {
                    code: c.code.clone(),
                    name: c.name.clone(),
                })
                .collect(),
            categories: b
                .categories
                .iter()
                .map(|c| DocumentCategory {
                    name: c.name.clone(),
                })
                .collect(),
            doc_types,
            elements: b
                .elements
                .iter()
                .map(|e| DocumentElement {
                    name: e.name.clone(),
                })
                .collect(),
            documents,
            evaluations,
            barcodes,
            element_fields: b
                .element_fields
                .iter()
                .map(|f| ElementField {
                    id: f.id,
                    field_type: f.field_type.clone(),
                })
                .collect(),
            visa_info: b
                .visa_requirement_information
                .iter()
                .map(|v| VisaRequirementInformation {
                    identifier: v.identifier,
                })
                .collect(),
            visa_requirements,
            specifications,
            document_index: doc_ix,
        })
    }

    /// Inverse of [`Store::from_bundle`], with implicit ids made explicit.
    pub fn to_bundle(&self) -> Bundle {
        let doc_id = |i: usize| self.documents[i].id;
        Bundle {
            countries: self
                .countries
                .iter()
                .map(|c| CountryEntry {
                    code: c.code.clone(),
                    name: c.name.clone(),
                })
                .collect(),
            categories: self
                .categories
                .iter()
                .map(|c| NameEntry {
                    name: c.name.clone(),
                })
                .collect(),
            doc_types: self
                .doc_types
                .iter()
                .map(|t| DocTypeEntry {
                    name: t.name.clone(),
                    category: self.categories[t.category].name.clone(),
                    issuing_country: self.countries[t.issuing_country].code.clone(),
                })
                .collect(),
            elements: self
                .elements
                .iter()
                .map(|e| NameEntry {
                    name: e.name.clone(),
                })
                .collect(),
            documents: self
                .documents
                .iter()
                .map(|d| DocumentEntry {
                    id: d.id,
                    doc_type: self.doc_types[d.doc_type].name.clone(),
                    issuing_country: self.countries[d.issuing_country].code.clone(),
                    issuing_date: d.issuing_date,
                    document_number: d.document_number.clone(),
                    assessment: d.assessment,
                })
                .collect(),
            element_evaluations: self
                .evaluations
                .iter()
                .map(|e| EvaluationEntry {
                    id: Some(e.id),
                    document: doc_id(e.document),
                    element: self.elements[e.element].name.clone(),
                    part: e.part.clone(),
                    category: e.category.clone(),
                })
                .collect(),
            barcodes: self
                .barcodes
                .iter()
                .map(|x| BarcodeEntry {
                    id: Some(x.id),
                    document: doc_id(x.document),
                    payload: x.payload.clone(),
                })
                .collect(),
            element_fields: self
                .element_fields
                .iter()
                .map(|f| ElementFieldEntry {
                    id: f.id,
                    field_type: f.field_type.clone(),
                })
                .collect(),
            visa_requirement_information: self
                .visa_info
                .iter()
                .map(|v| VisaInfoEntry {
                    identifier: v.identifier,
                })
                .collect(),
            visa_requirements: self
                .visa_requirements
                .iter()
                .map(|v| VisaRequirementEntry {
                    id: Some(v.id),
                    country_of_entry: self.countries[v.country_of_entry].code.clone(),
                    information: self.visa_info[v.information].identifier,
                })
                .collect(),
            specifications: self
                .specifications
                .iter()
                .map(|s| SpecificationEntry {
                    id: Some(s.id),
                    doc_type: self.doc_types[s.doc_type].name.clone(),
                    element: self.elements[s.element].name.clone(),
                    expected_parts: s.expected_parts.clone(),
                    issue_window: s.issue_window,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_bundle()).expect("bundle serializes")
    }

    /// SHA-256 over the canonical bundle serialization.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(&self.to_bundle()).expect("bundle serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn schema(&self) -> Schema {
        Schema
    }

    pub fn len(&self, collection: Collection) -> usize {
        use Collection as C;
        match collection {
            C::Countries => self.countries.len(),
            C::DocumentCategories => self.categories.len(),
            C::DocumentTypes => self.doc_types.len(),
            C::DocumentElements => self.elements.len(),
            C::Documents => self.documents.len(),
            C::ElementEvaluations => self.evaluations.len(),
            C::Barcodes => self.barcodes.len(),
            C::ElementFields => self.element_fields.len(),
            C::VisaRequirementInformation => self.visa_info.len(),
            C::VisaRequirements => self.visa_requirements.len(),
            C::Specifications => self.specifications.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        Collection::ALL.iter().all(|c| self.len(*c) == 0)
    }

    pub fn documents(&self) -> &[DocumentRecord] {
        &self.documents
    }

    pub fn evaluations(&self) -> &[ElementEvaluation] {
        &self.evaluations
    }

    pub fn specifications(&self) -> &[DocumentSpecification] {
        &self.specifications
    }

    pub fn document_index(&self, id: u64) -> Option<usize> {
        self.document_index.get(&id).copied()
    }

    pub fn document(&self, id: u64) -> Option<&DocumentRecord> {
        self.document_index(id).map(|i| &self.documents[i])
    }

    pub fn document_row(&self, id: u64) -> Option<RowRef> {
        self.document_index(id)
            .map(|i| RowRef::new(Collection::Documents, i))
    }

    pub fn doc_type_name(&self, doc: &DocumentRecord) -> &str {
        &self.doc_types[doc.doc_type].name
    }

    pub fn country(&self, index: usize) -> &Country {
        &self.countries[index]
    }

    pub fn element_name(&self, index: usize) -> &str {
        &self.elements[index].name
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e.name == name)
    }

    /// The specification registered for a document's type, if any.
    pub fn specification_for(&self, doc: &DocumentRecord) -> Option<&DocumentSpecification> {
        self.specifications
            .iter()
            .find(|s| s.doc_type == doc.doc_type)
    }

    /// Compact JSON description of a document and its element evaluations,
    /// used when showing documents to a model.
    pub fn document_summary(&self, id: u64) -> Option<String> {
        let ix = self.document_index(id)?;
        let doc = &self.documents[ix];
        let evaluations: serde_json::Map<String, serde_json::Value> = self
            .evaluations
            .iter()
            .filter(|e| e.document == ix)
            .map(|e| {
                (
                    format!("{}/{}", self.element_name(e.element), e.part),
                    serde_json::Value::from(e.category.clone()),
                )
            })
            .collect();
        let summary = serde_json::json!({
            "id": doc.id,
            "doc_type": self.doc_type_name(doc),
            "issuing_country": self.countries[doc.issuing_country].code,
            "issuing_date": doc.issuing_date.map(|d| d.format("%Y-%m-%d").to_string()),
            "document_number": doc.document_number,
            "assessment": doc.assessment.label(),
            "evaluations": evaluations,
        });
        Some(summary.to_string())
    }

    pub fn row_key(&self, row: RowRef) -> Value {
        self.field(row, row.collection.key_field())
            .unwrap_or(Value::Null)
    }

    /// Reads one field of a row. `None` when the collection has no such field.
    pub fn field(&self, row: RowRef, name: &str) -> Option<Value> {
        use Collection as C;
        let i = row.index;
        let r = |c: Collection, index: usize| Value::Row(RowRef::new(c, index));
        let s = |x: &String| Value::Str(x.clone());
        let n = |x: u64| Value::Int(x as i64);
        let v = match (row.collection, name) {
            (C::Countries, "code") => s(&self.countries[i].code),
            (C::Countries, "name") => s(&self.countries[i].name),
            (C::DocumentCategories, "name") => s(&self.categories[i].name),
            (C::DocumentTypes, "name") => s(&self.doc_types[i].name),
            (C::DocumentTypes, "category") => r(C::DocumentCategories, self.doc_types[i].category),
            (C::DocumentTypes, "issuing_country") => r(C::Countries, self.doc_types[i].issuing_country),
            (C::DocumentElements, "name") => s(&self.elements[i].name),
            (C::Documents, "id") => n(self.documents[i].id),
            (C::Documents, "doc_type") => r(C::DocumentTypes, self.documents[i].doc_type),
            (C::Documents, "issuing_country") => r(C::Countries, self.documents[i].issuing_country),
            (C::Documents, "issuing_date") => self.documents[i]
                .issuing_date
                .map_or(Value::Null, Value::Date),
            (C::Documents, "document_number") => s(&self.documents[i].document_number),
            (C::Documents, "assessment") => Value::from(self.documents[i].assessment.label()),
            (C::ElementEvaluations, "id") => n(self.evaluations[i].id),
            (C::ElementEvaluations, "document") => r(C::Documents, self.evaluations[i].document),
            (C::ElementEvaluations, "element") => r(C::DocumentElements, self.evaluations[i].element),
            (C::ElementEvaluations, "part") => s(&self.evaluations[i].part),
            (C::ElementEvaluations, "category") => s(&self.evaluations[i].category),
            (C::Barcodes, "id") => n(self.barcodes[i].id),
            (C::Barcodes, "document") => r(C::Documents, self.barcodes[i].document),
            (C::Barcodes, "payload") => s(&self.barcodes[i].payload),
            (C::ElementFields, "id") => n(self.element_fields[i].id),
            (C::ElementFields, "field_type") => s(&self.element_fields[i].field_type),
            (C::VisaRequirementInformation, "identifier") => n(self.visa_info[i].identifier),
            (C::VisaRequirements, "id") => n(self.visa_requirements[i].id),
            (C::VisaRequirements, "country_of_entry") => {
                r(C::Countries, self.visa_requirements[i].country_of_entry)
            }
            (C::VisaRequirements, "information") => {
                r(C::VisaRequirementInformation, self.visa_requirements[i].information)
            }
            (C::Specifications, "id") => n(self.specifications[i].id),
            (C::Specifications, "doc_type") => r(C::DocumentTypes, self.specifications[i].doc_type),
            (C::Specifications, "element") => r(C::DocumentElements, self.specifications[i].element),
            (C::Specifications, "issue_start") => self.specifications[i]
                .issue_window
                .map_or(Value::Null, |w| Value::Date(w.start)),
            (C::Specifications, "issue_end") => self.specifications[i]
                .issue_window
                .map_or(Value::Null, |w| Value::Date(w.end)),
            _ => return None,
        };
        Some(v)
    }
}
