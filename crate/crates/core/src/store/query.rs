//! `filter` / `exclude` / `get` / `count` over store collections.

use std::fmt;

use thiserror::Error;

use super::{Collection, Schema, Store};
use crate::value::{compare_values, iexact, values_equal, RowRef, RowSet, Value};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QueryError {
    #[error("unknown collection `{0}`")]
    UnknownCollection(String),
    #[error("{collection} has no field path `{path}`")]
    UnknownField { collection: Collection, path: String },
    #[error("no {collection} row matches {detail}")]
    NotFound {
        collection: Collection,
        detail: String,
    },
    #[error("get() on {collection} matched {count} rows")]
    MultipleRows { collection: Collection, count: usize },
    #[error("invalid predicate: {0}")]
    InvalidPredicate(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredOp {
    Eq,
    Ne,
    Lt,
    Lte,
    Gt,
    Gte,
    In,
    IExact,
    IsNull,
}

impl PredOp {
    pub const ALL: [PredOp; 9] = [
        PredOp::Eq,
        PredOp::Ne,
        PredOp::Lt,
        PredOp::Lte,
        PredOp::Gt,
        PredOp::Gte,
        PredOp::In,
        PredOp::IExact,
        PredOp::IsNull,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            PredOp::Eq => "==",
            PredOp::Ne => "!=",
            PredOp::Lt => "<",
            PredOp::Lte => "<=",
            PredOp::Gt => ">",
            PredOp::Gte => ">=",
            PredOp::In => "in",
            PredOp::IExact => "iexact",
            PredOp::IsNull => "isnull",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|op| op.symbol() == s)
    }
}

impl fmt::Display for PredOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// One `path op value` condition. Paths are dotted and follow references
/// (`element.name`).
#[derive(Debug, Clone, PartialEq)]
pub struct Predicate {
    pub path: Vec<String>,
    pub op: PredOp,
    pub value: Value,
}

impl Predicate {
    pub fn new(path: &str, op: PredOp, value: Value) -> Result<Self, QueryError> {
        let path: Vec<String> = path.split('.').map(str::to_string).collect();
        Self::from_parts(path, op, value)
    }

    pub fn from_parts(path: Vec<String>, op: PredOp, value: Value) -> Result<Self, QueryError> {
        if path.is_empty() || path.iter().any(String::is_empty) {
            return Err(QueryError::InvalidPredicate(format!(
                "malformed path `{}`",
                path.join(".")
            )));
        }
        match (op, &value) {
            (PredOp::In, Value::List(_) | Value::Rows(_)) => {}
            (PredOp::In, other) => {
                return Err(QueryError::InvalidPredicate(format!(
                    "`in` needs a list, got {}",
                    other.type_name()
                )))
            }
            (PredOp::IsNull, Value::Bool(_)) => {}
            (PredOp::IsNull, other) => {
                return Err(QueryError::InvalidPredicate(format!(
                    "`isnull` needs a boolean, got {}",
                    other.type_name()
                )))
            }
            _ => {}
        }
        Ok(Self { path, op, value })
    }

    pub fn eq(path: &str, value: impl Into<Value>) -> Self {
        Self::new(path, PredOp::Eq, value.into()).expect("eq predicates are always valid")
    }

    pub fn path_str(&self) -> String {
        self.path.join(".")
    }

    fn validate(&self, collection: Collection) -> Result<(), QueryError> {
        Schema
            .resolve_path(collection, &self.path)
            .map(|_| ())
            .map_err(|_| QueryError::UnknownField {
                collection,
                path: self.path_str(),
            })
    }

    fn matches(&self, store: &Store, row: RowRef) -> Result<bool, QueryError> {
        let field = store.resolve_path(row, &self.path);
        let v = &self.value;
        let ordered = |want: &dyn Fn(std::cmp::Ordering) -> bool| {
            let l = scalar(store, &field);
            let r = scalar(store, v);
            if l.is_null() || r.is_null() {
                return Ok(false);
            }
            match compare_values(&l, &r) {
                Some(o) => Ok(want(o)),
                None => Err(QueryError::TypeMismatch(format!(
                    "cannot order {} against {}",
                    l.type_name(),
                    r.type_name()
                ))),
            }
        };
        match self.op {
            PredOp::Eq => Ok(values_equal(store, &field, v)),
            PredOp::Ne => Ok(!values_equal(store, &field, v)),
            PredOp::Lt => ordered(&|o| o.is_lt()),
            PredOp::Lte => ordered(&|o| o.is_le()),
            PredOp::Gt => ordered(&|o| o.is_gt()),
            PredOp::Gte => ordered(&|o| o.is_ge()),
            PredOp::In => Ok(match v {
                Value::List(items) => items.iter().any(|i| values_equal(store, &field, i)),
                Value::Rows(rs) => rs.iter().any(|r| values_equal(store, &field, &Value::Row(r))),
                _ => false,
            }),
            PredOp::IExact => match (scalar(store, &field), scalar(store, v)) {
                (Value::Null, _) | (_, Value::Null) => Ok(false),
                (Value::Str(a), Value::Str(b)) => Ok(iexact(&a, &b)),
                (a, b) => Err(QueryError::TypeMismatch(format!(
                    "iexact needs strings, got {} and {}",
                    a.type_name(),
                    b.type_name()
                ))),
            },
            PredOp::IsNull => Ok(matches!(v, Value::Bool(b) if field.is_null() == *b)),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {:?}", self.path_str(), self.op, self.value)
    }
}

/// Rows compare by their key field when meeting scalars.
fn scalar(store: &Store, v: &Value) -> Value {
    match v {
        Value::Row(r) => store.row_key(*r),
        other => other.clone(),
    }
}

impl Store {
    /// Follows a dotted path from a row. An empty path yields the row itself.
    pub fn resolve_path(&self, row: RowRef, path: &[String]) -> Value {
        let mut current = Value::Row(row);
        for segment in path {
            current = match current {
                Value::Row(r) => self.field(r, segment).unwrap_or(Value::Null),
                _ => Value::Null,
            };
        }
        current
    }

    pub fn all_rows(&self, collection: Collection) -> RowSet {
        RowSet::new(collection, (0..self.len(collection)).collect())
    }

    /// Keeps (`keep = true`) or drops the rows of `rows` satisfying every
    /// predicate, preserving order.
    pub fn select(
        &self,
        rows: &RowSet,
        preds: &[Predicate],
        keep: bool,
    ) -> Result<RowSet, QueryError> {
        for p in preds {
            p.validate(rows.collection)?;
        }
        let mut out = Vec::new();
        for row in rows.iter() {
            let mut all = true;
            for p in preds {
                if !p.matches(self, row)? {
                    all = false;
                    break;
                }
            }
            if all == keep {
                out.push(row.index);
            }
        }
        Ok(RowSet::new(rows.collection, out))
    }

    pub fn get_one(&self, rows: &RowSet, preds: &[Predicate]) -> Result<RowRef, QueryError> {
        let found = self.select(rows, preds, true)?;
        match found.len() {
            1 => Ok(found.get(0).expect("one row")),
            0 => Err(QueryError::NotFound {
                collection: rows.collection,
                detail: describe(preds),
            }),
            count => Err(QueryError::MultipleRows {
                collection: rows.collection,
                count,
            }),
        }
    }
}

fn describe(preds: &[Predicate]) -> String {
    if preds.is_empty() {
        return "[]".into();
    }
    let parts: Vec<String> = preds.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn collection(name: &str) -> Result<Collection, QueryError> {
    Collection::from_name(name).ok_or_else(|| QueryError::UnknownCollection(name.to_string()))
}

pub fn query_filter(store: &Store, name: &str, preds: &[Predicate]) -> Result<RowSet, QueryError> {
    let c = collection(name)?;
    store.select(&store.all_rows(c), preds, true)
}

/// Rows failing at least one predicate. With no predicates nothing remains.
pub fn query_exclude(store: &Store, name: &str, preds: &[Predicate]) -> Result<RowSet, QueryError> {
    let c = collection(name)?;
    store.select(&store.all_rows(c), preds, false)
}

pub fn query_get(store: &Store, name: &str, preds: &[Predicate]) -> Result<RowRef, QueryError> {
    let c = collection(name)?;
    store.get_one(&store.all_rows(c), preds)
}

pub fn query_count(store: &Store, name: &str, preds: &[Predicate]) -> Result<usize, QueryError> {
    query_filter(store, name, preds).map(|r| r.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::load_store;

    fn store() -> Store {
        load_store(
            r#"{
            "countries": [{"code": "DE", "name": "Deutschland"}],
            "categories": [{"name": "Reisepass"}],
            "doc_types": [{"name": "Reisepass", "category": "Reisepass", "issuing_country": "DE"}],
            "elements": [{"name": "Material"}, {"name": "Druck"}],
            "documents": [
                {"id": 1, "doc_type": "Reisepass", "issuing_country": "DE", "document_number": "A1", "assessment": "Echt"},
                {"id": 2, "doc_type": "Reisepass", "issuing_country": "DE", "issuing_date": "2010-01-01", "document_number": "A2", "assessment": "Echt"}
            ],
            "element_evaluations": [
                {"document": 1, "element": "Material", "part": "Cover", "category": "Papier"},
                {"document": 1, "element": "Material", "part": "Page 1", "category": "Kunststoff"},
                {"document": 1, "element": "Druck", "part": "Cover", "category": "Offset"}
            ],
            "barcodes": [{"document": 1, "payload": "x"}, {"document": 2, "payload": "y"}],
            "element_fields": [{"id": 1, "field_type": "example.DateField"}, {"id": 2, "field_type": "example.CharField"}],
            "visa_requirement_information": [{"identifier": 1}, {"identifier": 2}],
            "visa_requirements": [{"country_of_entry": "DE", "information": 1}]
        }"#,
        )
        .unwrap()
    }

    #[test]
    fn empty_filter_returns_everything_in_order() {
        let s = store();
        let rows = query_filter(&s, "Barcodes", &[]).unwrap();
        assert_eq!(&*rows.rows, &[0, 1]);
    }

    #[test]
    fn filter_by_string_field() {
        let s = store();
        let rows = query_filter(&s, "ElementFields", &[Predicate::eq("field_type", "example.DateField")]).unwrap();
        assert_eq!(&*rows.rows, &[0]);
    }

    #[test]
    fn filter_follows_references() {
        let s = store();
        let preds = [Predicate::eq("document", 1), Predicate::eq("element.name", "Material")];
        let rows = query_filter(&s, "ElementEvaluations", &preds).unwrap();
        assert_eq!(&*rows.rows, &[0, 1]);
    }

    #[test]
    fn exclude_is_case_insensitive() {
        let s = store();
        let p = Predicate::new("category", PredOp::IExact, "kunststoff".into()).unwrap();
        let rows = query_exclude(&s, "ElementEvaluations", &[p]).unwrap();
        assert_eq!(&*rows.rows, &[0, 2]);
        assert!(query_exclude(&s, "ElementEvaluations", &[]).unwrap().is_empty());
    }

    #[test]
    fn get_cardinality() {
        let s = store();
        let row = query_get(&s, "VisaRequirementInformation", &[Predicate::eq("identifier", 1)]).unwrap();
        assert_eq!(row.index, 0);
        assert!(matches!(
            query_get(&s, "Barcodes", &[]),
            Err(QueryError::MultipleRows { count: 2, .. })
        ));
        let empty = load_store("{}").unwrap();
        assert!(matches!(
            query_get(&empty, "Documents", &[]),
            Err(QueryError::NotFound { .. })
        ));
    }

    #[test]
    fn count_and_errors() {
        let s = store();
        assert_eq!(query_count(&s, "Documents", &[]).unwrap(), 2);
        assert!(matches!(
            query_count(&s, "Wombats", &[]),
            Err(QueryError::UnknownCollection(_))
        ));
        assert!(matches!(
            query_count(&s, "Documents", &[Predicate::eq("colour", "red")]),
            Err(QueryError::UnknownField { .. })
        ));
        assert!(matches!(
            query_count(&s, "Documents", &[Predicate::eq("document_number.x", "red")]),
            Err(QueryError::UnknownField { .. })
        ));
    }

    #[test]
    fn null_handling() {
        let s = store();
        let isnull = Predicate::new("issuing_date", PredOp::IsNull, true.into()).unwrap();
        assert_eq!(&*query_filter(&s, "Documents", &[isnull]).unwrap().rows, &[0]);
        let date = chrono::NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
        let gt = Predicate::new("issuing_date", PredOp::Gt, date.into()).unwrap();
        assert_eq!(&*query_filter(&s, "Documents", std::slice::from_ref(&gt)).unwrap().rows, &[1]);
        assert_eq!(&*query_exclude(&s, "Documents", &[gt]).unwrap().rows, &[0]);
    }

    #[test]
    fn in_accepts_lists_and_row_sets() {
        let s = store();
        let info = query_filter(&s, "VisaRequirementInformation", &[Predicate::eq("identifier", 1)]).unwrap();
        let p = Predicate::new("information", PredOp::In, Value::Rows(info)).unwrap();
        assert_eq!(query_count(&s, "VisaRequirements", &[p]).unwrap(), 1);
        let p = Predicate::new("country_of_entry", PredOp::In, Value::List(vec!["FR".into(), "DE".into()])).unwrap();
        assert_eq!(query_count(&s, "VisaRequirements", &[p]).unwrap(), 1);
    }

    #[test]
    fn predicate_value_shapes() {
        assert!(Predicate::new("x", PredOp::In, 1.into()).is_err());
        assert!(Predicate::new("x", PredOp::IsNull, "yes".into()).is_err());
        assert!(Predicate::new("a..b", PredOp::Eq, 1.into()).is_err());
    }
}
