use serde::{Deserialize, Serialize};

use crate::store::Store;

/// One property row of a document, as in a document-properties table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyRecord {
    pub document_id: u64,
    pub property: String,
    pub value: String,
}

pub fn document_property_records(store: &Store) -> Vec<PropertyRecord> {
    let mut out = Vec::new();
    for doc in store.documents() {
        let mut push = |property: &str, value: String| {
            out.push(PropertyRecord {
                document_id: doc.id,
                property: property.to_string(),
                value,
            })
        };
        push("Document Type", store.doc_type_name(doc).to_string());
        push("Issuing Country", store.country(doc.issuing_country).name.clone());
        push("Assessment", doc.assessment.label().to_string());
        push("Document Number", doc.document_number.clone());
        if let Some(date) = doc.issuing_date {
            push("Issuing Date", date.format("%Y-%m-%d").to_string());
        }
    }
    out
}
