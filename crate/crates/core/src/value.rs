//! Runtime values shared by the query engine and the check interpreter.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use chrono::NaiveDate;
use indexmap::IndexMap;

use crate::store::{Collection, Store};

/// A reference to one row of a store collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RowRef {
    pub collection: Collection,
    pub index: usize,
}

impl RowRef {
    pub fn new(collection: Collection, index: usize) -> Self {
        Self { collection, index }
    }
}

/// An ordered set of rows from one collection (a query result).
#[derive(Debug, Clone, PartialEq)]
pub struct RowSet {
    pub collection: Collection,
    pub rows: Arc<[usize]>,
}

impl RowSet {
    pub fn new(collection: Collection, rows: Vec<usize>) -> Self {
        Self {
            collection,
            rows: rows.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<RowRef> {
        self.rows
            .get(i)
            .map(|&index| RowRef::new(self.collection, index))
    }

    pub fn iter(&self) -> impl Iterator<Item = RowRef> + '_ {
        self.rows
            .iter()
            .map(move |&index| RowRef::new(self.collection, index))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Real(f64),
    Str(String),
    Date(NaiveDate),
    List(Vec<Value>),
    Map(IndexMap<String, Value>),
    Row(RowRef),
    Rows(RowSet),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Null => "null",
            Value::Bool(_) => "bool",
            Value::Int(_) => "int",
            Value::Real(_) => "real",
            Value::Str(_) => "string",
            Value::Date(_) => "date",
            Value::List(_) => "list",
            Value::Map(_) => "map",
            Value::Row(_) => "row",
            Value::Rows(_) => "rows",
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Real(r) => Some(*r),
            _ => None,
        }
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(s)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<NaiveDate> for Value {
    fn from(d: NaiveDate) -> Self {
        Value::Date(d)
    }
}

/// Equality as seen by checks and queries.
///
/// Null equals only null; ints and reals compare numerically; a row compared
/// with a scalar compares the row's key field.
pub fn values_equal(store: &Store, a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Null, Value::Null) => true,
        (Value::Null, _) | (_, Value::Null) => false,
        (Value::Row(x), Value::Row(y)) => x == y,
        (Value::Row(r), other) | (other, Value::Row(r)) => {
            let key = store.row_key(*r);
            !matches!(other, Value::Rows(_) | Value::List(_) | Value::Map(_))
                && values_equal(store, &key, other)
        }
        (Value::Int(x), Value::Real(y)) | (Value::Real(y), Value::Int(x)) => (*x as f64) == *y,
        (Value::List(x), Value::List(y)) => {
            x.len() == y.len() && x.iter().zip(y).all(|(p, q)| values_equal(store, p, q))
        }
        (Value::Map(x), Value::Map(y)) => {
            x.len() == y.len()
                && x.iter()
                    .zip(y)
                    .all(|((k1, v1), (k2, v2))| k1 == k2 && values_equal(store, v1, v2))
        }
        _ => a == b,
    }
}

/// Ordering for `<`, `<=`, `>`, `>=`. `None` means the operands are not
/// comparable (including any null).
pub fn compare_values(a: &Value, b: &Value) -> Option<Ordering> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => Some(x.cmp(y)),
        (Value::Int(_) | Value::Real(_), Value::Int(_) | Value::Real(_)) => {
            a.as_f64()?.partial_cmp(&b.as_f64()?)
        }
        (Value::Str(x), Value::Str(y)) => Some(x.cmp(y)),
        (Value::Date(x), Value::Date(y)) => Some(x.cmp(y)),
        (Value::Bool(x), Value::Bool(y)) => Some(x.cmp(y)),
        _ => None,
    }
}

/// Full-Unicode lowercase equality, the semantics of `iexact`.
pub fn iexact(a: &str, b: &str) -> bool {
    a.to_lowercase() == b.to_lowercase()
}

/// Rendering used for detail-map values and `format` slots.
pub fn display_value(store: &Store, v: &Value) -> String {
    match v {
        Value::Null => "null".into(),
        Value::Bool(b) => b.to_string(),
        Value::Int(i) => i.to_string(),
        Value::Real(r) => format!("{r:?}"),
        Value::Str(s) => s.clone(),
        Value::Date(d) => d.format("%Y-%m-%d").to_string(),
        Value::List(items) => {
            let parts: Vec<String> = items.iter().map(|i| display_value(store, i)).collect();
            format!("[{}]", parts.join(", "))
        }
        Value::Map(m) => {
            let parts: Vec<String> = m
                .iter()
                .map(|(k, v)| format!("{k}: {}", display_value(store, v)))
                .collect();
            format!("{{{}}}", parts.join(", "))
        }
        Value::Row(r) => display_value(store, &store.row_key(*r)),
        Value::Rows(rs) => {
            let parts: Vec<String> = rs
                .iter()
                .map(|r| display_value(store, &store.row_key(r)))
                .collect();
            format!("{}[{}]", rs.collection, parts.join(", "))
        }
    }
}

impl fmt::Display for RowRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.collection, self.index)
    }
}
