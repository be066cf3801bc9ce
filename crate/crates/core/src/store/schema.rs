use std::fmt;

/// Queryable collections of the document store.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Collection {
    Countries,
    DocumentCategories,
    DocumentTypes,
    DocumentElements,
    Documents,
    ElementEvaluations,
    Barcodes,
    ElementFields,
    VisaRequirementInformation,
    VisaRequirements,
    Specifications,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Int,
    Str,
    Date,
    Ref(Collection),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldDef {
    pub name: &'static str,
    pub kind: FieldKind,
    pub nullable: bool,
}

const fn field(name: &'static str, kind: FieldKind) -> FieldDef {
    FieldDef {
        name,
        kind,
        nullable: false,
    }
}

const fn nullable(name: &'static str, kind: FieldKind) -> FieldDef {
    FieldDef {
        name,
        kind,
        nullable: true,
    }
}

use Collection::*;
use FieldKind::*;

const COUNTRY_FIELDS: &[FieldDef] = &[field("code", Str), field("name", Str)];
const CATEGORY_FIELDS: &[FieldDef] = &[field("name", Str)];
const DOC_TYPE_FIELDS: &[FieldDef] = &[
    field("name", Str),
    field("category", Ref(DocumentCategories)),
    field("issuing_country", Ref(Countries)),
];
const ELEMENT_FIELDS: &[FieldDef] = &[field("name", Str)];
const DOCUMENT_FIELDS: &[FieldDef] = &[
    field("id", Int),
    field("doc_type", Ref(DocumentTypes)),
    field("issuing_country", Ref(Countries)),
    nullable("issuing_date", Date),
    field("document_number", Str),
    field("assessment", Str),
];
const EVALUATION_FIELDS: &[FieldDef] = &[
    field("id", Int),
    field("document", Ref(Documents)),
    field("element", Ref(DocumentElements)),
    field("part", Str),
    field("category", Str),
];
const BARCODE_FIELDS: &[FieldDef] = &[
    field("id", Int),
    field("document", Ref(Documents)),
    field("payload", Str),
];
const ELEMENT_FIELD_FIELDS: &[FieldDef] = &[field("id", Int), field("field_type", Str)];
const VISA_INFO_FIELDS: &[FieldDef] = &[field("identifier", Int)];
const VISA_REQ_FIELDS: &[FieldDef] = &[
    field("id", Int),
    field("country_of_entry", Ref(Countries)),
    field("information", Ref(VisaRequirementInformation)),
];
const SPEC_FIELDS: &[FieldDef] = &[
    field("id", Int),
    field("doc_type", Ref(DocumentTypes)),
    field("element", Ref(DocumentElements)),
    nullable("issue_start", Date),
    nullable("issue_end", Date),
];

impl Collection {
    pub const ALL: [Collection; 11] = [
        Countries,
        DocumentCategories,
        DocumentTypes,
        DocumentElements,
        Documents,
        ElementEvaluations,
        Barcodes,
        ElementFields,
        VisaRequirementInformation,
        VisaRequirements,
        Specifications,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Countries => "Countries",
            DocumentCategories => "DocumentCategories",
            DocumentTypes => "DocumentTypes",
            DocumentElements => "DocumentElements",
            Documents => "Documents",
            ElementEvaluations => "ElementEvaluations",
            Barcodes => "Barcodes",
            ElementFields => "ElementFields",
            VisaRequirementInformation => "VisaRequirementInformation",
            VisaRequirements => "VisaRequirements",
            Specifications => "Specifications",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn fields(self) -> &'static [FieldDef] {
        match self {
            Countries => COUNTRY_FIELDS,
            DocumentCategories => CATEGORY_FIELDS,
            DocumentTypes => DOC_TYPE_FIELDS,
            DocumentElements => ELEMENT_FIELDS,
            Documents => DOCUMENT_FIELDS,
            ElementEvaluations => EVALUATION_FIELDS,
            Barcodes => BARCODE_FIELDS,
            ElementFields => ELEMENT_FIELD_FIELDS,
            VisaRequirementInformation => VISA_INFO_FIELDS,
            VisaRequirements => VISA_REQ_FIELDS,
            Specifications => SPEC_FIELDS,
        }
    }

    pub fn field(self, name: &str) -> Option<&'static FieldDef> {
        self.fields().iter().find(|f| f.name == name)
    }

    /// The field a bare literal is compared against when it meets a row of
    /// this collection (`issuing_country == "DE"`, `document == 1`).
    pub fn key_field(self) -> &'static str {
        match self {
            Countries => "code",
            DocumentCategories | DocumentTypes | DocumentElements => "name",
            VisaRequirementInformation => "identifier",
            _ => "id",
        }
    }
}

impl fmt::Display for Collection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The store schema: collection names and their typed fields.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Schema;

impl Schema {
    pub fn collection(&self, name: &str) -> Option<Collection> {
        Collection::from_name(name)
    }

    /// Resolves a dotted path starting at `collection`, following references.
    /// Returns the kind of the final field, or the offending segment.
    pub fn resolve_path<'p>(
        &self,
        collection: Collection,
        path: &'p [String],
    ) -> Result<FieldKind, &'p str> {
        let mut current = collection;
        let mut kind = None;
        for segment in path {
            if let Some(FieldKind::Int | FieldKind::Str | FieldKind::Date) = kind {
                return Err(segment);
            }
            let def = current.field(segment).ok_or(segment.as_str())?;
            if let FieldKind::Ref(target) = def.kind {
                current = target;
            }
            kind = Some(def.kind);
        }
        Ok(kind.unwrap_or(FieldKind::Ref(collection)))
    }

    /// Human-readable schema listing used in prompts.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for c in Collection::ALL {
            let fields: Vec<String> = c
                .fields()
                .iter()
                .map(|f| {
                    let kind = match f.kind {
                        FieldKind::Int => "int".to_string(),
                        FieldKind::Str => "string".to_string(),
                        FieldKind::Date => "date".to_string(),
                        FieldKind::Ref(t) => format!("-> {t}"),
                    };
                    if f.nullable {
                        format!("{}: {kind}?", f.name)
                    } else {
                        format!("{}: {kind}", f.name)
                    }
                })
                .collect();
            out.push_str(&format!("{}({})\n", c.name(), fields.join(", ")));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Vec<String> {
        s.split('.').map(str::to_string).collect()
    }

    #[test]
    fn names_round_trip() {
        for c in Collection::ALL {
            assert_eq!(Collection::from_name(c.name()), Some(c));
        }
        assert_eq!(Collection::from_name("Wombats"), None);
    }

    #[test]
    fn paths_follow_references() {
        let s = Schema;
        assert_eq!(s.resolve_path(Documents, &p("issuing_country.code")), Ok(Str));
        assert_eq!(
            s.resolve_path(ElementEvaluations, &p("element")),
            Ok(Ref(DocumentElements))
        );
        assert_eq!(s.resolve_path(Documents, &p("colour")), Err("colour"));
        assert_eq!(
            s.resolve_path(Documents, &p("document_number.length")),
            Err("length")
        );
    }
}
