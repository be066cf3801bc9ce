//! Tree-walking interpreter. Reads the store, never writes it, and stops
//! after a fixed number of evaluation steps.

use std::collections::HashMap;

use chrono::{Datelike, Duration};
use indexmap::IndexMap;

use super::ast::*;
use super::linfit::linear_fit;
use super::outcome::{CheckOutcome, ExecMode};
use super::parser::{calendar_date, DOCUMENT_VAR};
use crate::store::{Collection, DocumentRecord, Predicate, Store};
use crate::value::{compare_values, display_value, iexact, values_equal, Value};

pub const STEP_BUDGET: u64 = 1_000_000;

type Eval<T> = Result<T, String>;

struct Interp<'s> {
    store: &'s Store,
    env: HashMap<String, Value>,
    steps: u64,
    budget: u64,
}

/// Runs `ast` against one document.
pub fn interpret(ast: &CheckAst, document: &DocumentRecord, store: &Store, mode: ExecMode) -> CheckOutcome {
    interpret_with_budget(ast, document, store, mode, STEP_BUDGET)
}

pub fn interpret_with_budget(
    ast: &CheckAst,
    document: &DocumentRecord,
    store: &Store,
    mode: ExecMode,
    budget: u64,
) -> CheckOutcome {
    let Some(row) = store.document_row(document.id) else {
        return CheckOutcome::runtime_error(format!("document {} is not in the store", document.id));
    };
    let mut it = Interp {
        store,
        env: HashMap::from([(DOCUMENT_VAR.to_string(), Value::Row(row))]),
        steps: 0,
        budget,
    };
    match it.run(ast, mode) {
        Ok(outcome) => outcome,
        Err(message) => CheckOutcome::RuntimeError { message },
    }
}

fn type_error<T>(what: &str, v: &Value) -> Eval<T> {
    Err(format!("{what}, got {}", v.type_name()))
}

impl Interp<'_> {
    fn tick(&mut self) -> Eval<()> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(format!("step budget of {} exhausted", self.budget))
        } else {
            Ok(())
        }
    }

    fn charge(&mut self, steps: usize) -> Eval<()> {
        self.steps = self.steps.saturating_add(steps as u64);
        self.tick()
    }

    /// Copying or building a string or container costs one step per
    /// element, which keeps memory bounded along with time.
    fn charge_size(&mut self, v: &Value) -> Eval<()> {
        match v {
            Value::Str(s) => self.charge(s.len()),
            Value::List(items) => self.charge(items.len()),
            Value::Map(m) => self.charge(m.len()),
            _ => Ok(()),
        }
    }

    fn run(&mut self, ast: &CheckAst, mode: ExecMode) -> Eval<CheckOutcome> {
        let mut guards = IndexMap::new();
        let mut guard_ix = 0;
        for stmt in &ast.statements {
            self.tick()?;
            match stmt {
                Stmt::Require(r) => {
                    let ok = match self.eval(&r.cond)? {
                        Value::Bool(b) => b,
                        other => return type_error("`require` needs a boolean condition", &other),
                    };
                    if !ok {
                        if mode == ExecMode::Exact && !r.log {
                            return Ok(CheckOutcome::NotApplicable {
                                message: r.message.clone(),
                            });
                        }
                        guards.insert(format!("guard_{guard_ix}"), r.message.clone());
                    }
                    guard_ix += 1;
                }
                Stmt::Let { name, value, .. } => {
                    let v = self.eval(value)?;
                    self.env.insert(name.clone(), v);
                }
                Stmt::For {
                    index,
                    item,
                    iter,
                    body,
                    ..
                } => self.run_for(index, item, iter, body)?,
                Stmt::Return { flag, details, .. } => {
                    let flag = match self.eval(flag)? {
                        Value::Bool(b) => b,
                        other => return type_error("returned flag must be a boolean", &other),
                    };
                    let details = match self.eval(details)? {
                        Value::Map(m) => m
                            .iter()
                            .map(|(k, v)| (k.clone(), display_value(self.store, v)))
                            .collect(),
                        other => return type_error("returned details must be a map", &other),
                    };
                    return Ok(CheckOutcome::Triggered {
                        flag,
                        details,
                        guards,
                    });
                }
            }
        }
        Err("check ended without `return`".into())
    }

    fn run_for(&mut self, index: &str, item: &str, iter: &Expr, body: &[Assign]) -> Eval<()> {
        let saved: Vec<(String, Option<Value>)> = [index, item]
            .iter()
            .map(|n| (n.to_string(), self.env.get(*n).cloned()))
            .collect();
        // Iterating a variable reads it afresh on every step, so a body that
        // grows the collection it walks keeps the loop going.
        let live = match &iter.kind {
            ExprKind::Ident(name)
                if matches!(self.env.get(name), Some(Value::List(_) | Value::Map(_))) =>
            {
                Some(name.clone())
            }
            _ => None,
        };
        let fixed = match &live {
            Some(_) => None,
            None => Some(self.eval(iter)?),
        };
        let mut i = 0usize;
        let result = loop {
            if let Err(e) = self.tick() {
                break Err(e);
            }
            let current = match (&live, &fixed) {
                (Some(name), _) => self.env.get(name).expect("loop variable bound"),
                (None, Some(v)) => v,
                _ => unreachable!(),
            };
            let pair = match current {
                Value::List(items) => items.get(i).map(|v| (Value::Int(i as i64), v.clone())),
                Value::Map(m) => m
                    .get_index(i)
                    .map(|(k, v)| (Value::Str(k.clone()), v.clone())),
                Value::Rows(rows) => rows.get(i).map(|r| (Value::Int(i as i64), Value::Row(r))),
                other => break type_error("`for` needs a list, map or query result", other),
            };
            let Some((k, v)) = pair else { break Ok(()) };
            self.env.insert(index.to_string(), k);
            self.env.insert(item.to_string(), v);
            if let Err(e) = body.iter().try_for_each(|a| self.assign(a)) {
                break Err(e);
            }
            i += 1;
        };
        for (name, old) in saved {
            match old {
                Some(v) => self.env.insert(name, v),
                None => self.env.remove(&name),
            };
        }
        result
    }

    fn assign(&mut self, a: &Assign) -> Eval<()> {
        self.tick()?;
        let key = self.eval(&a.key)?;
        let value = self.eval(&a.value)?;
        let target = self
            .env
            .get_mut(&a.target)
            .ok_or_else(|| format!("`{}` is not defined", a.target))?;
        match target {
            Value::Map(m) => {
                let key = match key {
                    Value::Str(s) => s,
                    Value::Int(i) => i.to_string(),
                    other => return type_error("map keys must be strings or integers", &other),
                };
                m.insert(key, value);
                Ok(())
            }
            Value::List(items) => {
                let i = match key {
                    Value::Int(i) if i >= 0 && (i as usize) <= items.len() => i as usize,
                    Value::Int(i) => return Err(format!("list index {i} out of range")),
                    other => return type_error("list index must be an integer", &other),
                };
                if i == items.len() {
                    items.push(value);
                } else {
                    items[i] = value;
                }
                Ok(())
            }
            other => type_error("only maps and lists can be assigned into", other),
        }
    }

    fn bool(&mut self, e: &Expr, what: &str) -> Eval<bool> {
        match self.eval(e)? {
            Value::Bool(b) => Ok(b),
            other => type_error(&format!("`{what}` needs booleans"), &other),
        }
    }

    fn key(&self, v: Value) -> Value {
        match v {
            Value::Row(r) => self.store.row_key(r),
            other => other,
        }
    }

    fn eval(&mut self, e: &Expr) -> Eval<Value> {
        self.tick()?;
        Ok(match &e.kind {
            ExprKind::Null => Value::Null,
            ExprKind::Bool(b) => Value::Bool(*b),
            ExprKind::Int(i) => Value::Int(*i),
            ExprKind::Real(r) => Value::Real(*r),
            ExprKind::Str(s) => Value::Str(s.clone()),
            ExprKind::Ident(name) => {
                let v = self
                    .env
                    .get(name)
                    .cloned()
                    .ok_or_else(|| format!("`{name}` is not defined"))?;
                self.charge_size(&v)?;
                v
            }
            ExprKind::Collection(name) => {
                let c = Collection::from_name(name).ok_or_else(|| format!("unknown collection `{name}`"))?;
                Value::Rows(self.store.all_rows(c))
            }
            ExprKind::NewMap => Value::Map(IndexMap::new()),
            ExprKind::Date(y, m, d) => {
                Value::Date(calendar_date(*y, *m, *d).ok_or_else(|| format!("invalid date {y}-{m}-{d}"))?)
            }
            ExprKind::List(items) => Value::List(items.iter().map(|i| self.eval(i)).collect::<Eval<_>>()?),
            ExprKind::Unary(UnaryOp::Not, inner) => Value::Bool(!self.bool(inner, "not")?),
            ExprKind::Unary(UnaryOp::Neg, inner) => match self.eval(inner)? {
                Value::Int(i) => Value::Int(i.checked_neg().ok_or("integer overflow")?),
                Value::Real(r) => Value::Real(-r),
                other => return type_error("`-` needs a number", &other),
            },
            ExprKind::Binary(BinOp::And, l, r) => Value::Bool(self.bool(l, "and")? && self.bool(r, "and")?),
            ExprKind::Binary(BinOp::Or, l, r) => Value::Bool(self.bool(l, "or")? || self.bool(r, "or")?),
            ExprKind::Binary(op, l, r) => {
                let l = self.eval(l)?;
                let r = self.eval(r)?;
                let v = self.binary(*op, l, r)?;
                self.charge_size(&v)?;
                v
            }
            ExprKind::Field(target, name) => match self.eval(target)? {
                Value::Row(row) => self
                    .store
                    .field(row, name)
                    .ok_or_else(|| format!("{} has no field `{name}`", row.collection))?,
                Value::Map(m) => m.get(name).cloned().ok_or_else(|| format!("map has no key `{name}`"))?,
                Value::Null => return Err(format!("field `{name}` accessed on null")),
                other => return type_error(&format!("field `{name}` needs a row or map"), &other),
            },
            ExprKind::Method(target, method, args) => {
                let rows = match self.eval(target)? {
                    Value::Rows(rows) => rows,
                    other => return type_error(&format!("`{}()` needs a query result", method.name()), &other),
                };
                let mut preds = Vec::new();
                if let MethodArgs::Preds(args) = args {
                    for p in args {
                        let value = self.eval(&p.value)?;
                        preds.push(Predicate::from_parts(p.path.clone(), p.op, value).map_err(|e| e.to_string())?);
                    }
                }
                let store = self.store;
                match method {
                    Method::Filter => Value::Rows(store.select(&rows, &preds, true).map_err(|e| e.to_string())?),
                    Method::Exclude => Value::Rows(store.select(&rows, &preds, false).map_err(|e| e.to_string())?),
                    Method::Get => Value::Row(store.get_one(&rows, &preds).map_err(|e| e.to_string())?),
                    Method::Count => Value::Int(rows.len() as i64),
                    Method::First => rows.get(0).map_or(Value::Null, Value::Row),
                    Method::All => Value::Rows(rows),
                }
            }
            ExprKind::Index(target, index) => {
                let target = self.eval(target)?;
                let index = self.eval(index)?;
                match (target, index) {
                    (Value::List(items), Value::Int(i)) => usize::try_from(i)
                        .ok()
                        .and_then(|i| items.get(i).cloned())
                        .ok_or_else(|| format!("list index {i} out of range"))?,
                    (Value::Rows(rows), Value::Int(i)) => usize::try_from(i)
                        .ok()
                        .and_then(|i| rows.get(i))
                        .map(Value::Row)
                        .ok_or_else(|| format!("row index {i} out of range"))?,
                    (Value::Map(m), Value::Str(k)) => m.get(&k).cloned().ok_or_else(|| format!("map has no key `{k}`"))?,
                    (Value::Map(m), Value::Int(k)) => m
                        .get(&k.to_string())
                        .cloned()
                        .ok_or_else(|| format!("map has no key `{k}`"))?,
                    (Value::Null, _) => return Err("indexing null".into()),
                    (t, i) => return Err(format!("cannot index {} with {}", t.type_name(), i.type_name())),
                }
            }
            ExprKind::Call(builtin, args) => {
                let args: Vec<Value> = args.iter().map(|a| self.eval(a)).collect::<Eval<_>>()?;
                let v = self.call(*builtin, args)?;
                self.charge_size(&v)?;
                v
            }
        })
    }

    fn binary(&self, op: BinOp, l: Value, r: Value) -> Eval<Value> {
        use Value::*;
        Ok(match op {
            BinOp::Eq => Bool(values_equal(self.store, &l, &r)),
            BinOp::Ne => Bool(!values_equal(self.store, &l, &r)),
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                let (l, r) = (self.key(l), self.key(r));
                if l.is_null() || r.is_null() {
                    return Err(format!("`{}` with null operand", op.symbol()));
                }
                let ord = compare_values(&l, &r)
                    .ok_or_else(|| format!("cannot compare {} with {}", l.type_name(), r.type_name()))?;
                Bool(match op {
                    BinOp::Lt => ord.is_lt(),
                    BinOp::Le => ord.is_le(),
                    BinOp::Gt => ord.is_gt(),
                    _ => ord.is_ge(),
                })
            }
            BinOp::IExact => match (self.key(l), self.key(r)) {
                (Str(a), Str(b)) => Bool(iexact(&a, &b)),
                (a, b) => return Err(format!("`iexact` needs strings, got {} and {}", a.type_name(), b.type_name())),
            },
            BinOp::In => match (l, r) {
                (needle, List(items)) => Bool(items.iter().any(|i| values_equal(self.store, &needle, i))),
                (needle, Rows(rows)) => Bool(rows.iter().any(|row| values_equal(self.store, &needle, &Row(row)))),
                (Str(k), Map(m)) => Bool(m.contains_key(&k)),
                (Str(needle), Str(hay)) => Bool(hay.contains(&needle)),
                (a, b) => return Err(format!("cannot test {} `in` {}", a.type_name(), b.type_name())),
            },
            BinOp::Add => match (l, r) {
                (Int(a), Int(b)) => Int(a.checked_add(b).ok_or("integer overflow")?),
                (Str(a), Str(b)) => Str(a + &b),
                (List(mut a), List(b)) => {
                    a.extend(b);
                    List(a)
                }
                (Date(d), Int(n)) | (Int(n), Date(d)) => Date(shift(d, n)?),
                (a, b) => Real(numbers(&a, &b, "+")?.iter().sum()),
            },
            BinOp::Sub => match (l, r) {
                (Int(a), Int(b)) => Int(a.checked_sub(b).ok_or("integer overflow")?),
                (Date(a), Date(b)) => Int((a - b).num_days()),
                (Date(d), Int(n)) => Date(shift(d, n.checked_neg().ok_or("integer overflow")?)?),
                (a, b) => {
                    let [x, y] = numbers(&a, &b, "-")?;
                    Real(x - y)
                }
            },
            BinOp::Mul => match (l, r) {
                (Int(a), Int(b)) => Int(a.checked_mul(b).ok_or("integer overflow")?),
                (a, b) => {
                    let [x, y] = numbers(&a, &b, "*")?;
                    Real(x * y)
                }
            },
            BinOp::Div => {
                let [x, y] = numbers(&l, &r, "/")?;
                if y == 0.0 {
                    return Err("division by zero".into());
                }
                Real(x / y)
            }
            BinOp::And | BinOp::Or => unreachable!("short-circuited"),
        })
    }

    fn call(&self, builtin: Builtin, args: Vec<Value>) -> Eval<Value> {
        use Value::*;
        let first = args.first().cloned().unwrap_or(Null);
        Ok(match builtin {
            Builtin::Len => Int(match &first {
                List(items) => items.len(),
                Map(m) => m.len(),
                Rows(rows) => rows.len(),
                Str(s) => s.chars().count(),
                other => return type_error("`len` needs a list, map, string or query result", other),
            } as i64),
            Builtin::Abs => match first {
                Int(i) => Int(i.checked_abs().ok_or("integer overflow")?),
                Real(r) => Real(r.abs()),
                other => return type_error("`abs` needs a number", &other),
            },
            Builtin::Format => {
                let Str(template) = &first else {
                    return type_error("`format` needs a template string", &first);
                };
                let pieces: Vec<&str> = template.split("{}").collect();
                if pieces.len() != args.len() {
                    return Err(format!(
                        "`format` template has {} slots but {} values were given",
                        pieces.len() - 1,
                        args.len() - 1
                    ));
                }
                let mut out = pieces[0].to_string();
                for (piece, value) in pieces[1..].iter().zip(&args[1..]) {
                    out.push_str(&display_value(self.store, value));
                    out.push_str(piece);
                }
                Str(out)
            }
            Builtin::Year | Builtin::Month | Builtin::Day => match first {
                Date(d) => Int(match builtin {
                    Builtin::Year => d.year() as i64,
                    Builtin::Month => d.month() as i64,
                    _ => d.day() as i64,
                }),
                other => return type_error(&format!("`{}` needs a date", builtin.name()), &other),
            },
            Builtin::LinearFit => {
                let List(items) = &first else {
                    return type_error("`linear_fit` needs a list of [x, y] pairs", &first);
                };
                let mut points = Vec::with_capacity(items.len());
                for item in items {
                    match item {
                        List(pair) if pair.len() == 2 => match (pair[0].as_f64(), pair[1].as_f64()) {
                            (Some(x), Some(y)) => points.push((x, y)),
                            _ => return Err("`linear_fit` points must be numeric".into()),
                        },
                        other => return type_error("`linear_fit` needs [x, y] pairs", other),
                    }
                }
                let fit = linear_fit(&points).map_err(|e| e.to_string())?;
                Map(IndexMap::from([
                    ("slope".to_string(), Real(fit.slope)),
                    ("intercept".to_string(), Real(fit.intercept)),
                    ("r2".to_string(), Real(fit.r2)),
                ]))
            }
            Builtin::Number => match first {
                Str(s) => {
                    let digits: String = s.chars().filter(char::is_ascii_digit).collect();
                    if digits.is_empty() {
                        return Err(format!("`number` found no digits in {s:?}"));
                    }
                    Int(digits.parse().map_err(|_| format!("`number` overflow in {s:?}"))?)
                }
                other => return type_error("`number` needs a string", &other),
            },
        })
    }
}

fn numbers(a: &Value, b: &Value, op: &str) -> Eval<[f64; 2]> {
    match (a.as_f64(), b.as_f64()) {
        (Some(x), Some(y)) => Ok([x, y]),
        _ => Err(format!("cannot apply `{op}` to {} and {}", a.type_name(), b.type_name())),
    }
}

fn shift(d: chrono::NaiveDate, days: i64) -> Eval<chrono::NaiveDate> {
    Duration::try_days(days)
        .and_then(|delta| d.checked_add_signed(delta))
        .ok_or_else(|| "date out of range".to_string())
}
