//! Static validation of store references against the schema.

use std::collections::{BTreeSet, HashMap};

use super::ast::*;
use super::error::LangError;
use super::parser::DOCUMENT_VAR;
use super::span::Span;
use crate::store::{Collection, FieldKind, Schema};

#[derive(Debug, Clone)]
enum Ty {
    Unknown,
    Rows(Collection),
    Row {
        root: Collection,
        path: Vec<String>,
        current: Collection,
    },
}

impl Ty {
    fn row(c: Collection) -> Ty {
        Ty::Row {
            root: c,
            path: Vec::new(),
            current: c,
        }
    }
}

struct Validator<'s> {
    schema: &'s Schema,
    paths: BTreeSet<String>,
}

/// Returns every `Collection.field.path` the check reads, failing on the
/// first collection or field the schema does not know.
pub fn validate_static(ast: &CheckAst, schema: &Schema) -> Result<BTreeSet<String>, LangError> {
    let mut v = Validator {
        schema,
        paths: BTreeSet::new(),
    };
    let mut env = HashMap::from([(DOCUMENT_VAR.to_string(), Ty::row(Collection::Documents))]);
    for stmt in &ast.statements {
        match stmt {
            Stmt::Require(r) => {
                v.expr(&r.cond, &env)?;
            }
            Stmt::Let { name, value, .. } => {
                let ty = v.expr(value, &env)?;
                env.insert(name.clone(), ty);
            }
            Stmt::For {
                index,
                item,
                iter,
                body,
                ..
            } => {
                let item_ty = match v.expr(iter, &env)? {
                    Ty::Rows(c) => Ty::row(c),
                    _ => Ty::Unknown,
                };
                let mut inner = env.clone();
                inner.insert(index.clone(), Ty::Unknown);
                inner.insert(item.clone(), item_ty);
                for a in body {
                    v.expr(&a.key, &inner)?;
                    v.expr(&a.value, &inner)?;
                }
            }
            Stmt::Return { flag, details, .. } => {
                v.expr(flag, &env)?;
                v.expr(details, &env)?;
            }
        }
    }
    Ok(v.paths)
}

impl Validator<'_> {
    fn record(&mut self, root: Collection, path: &[String]) {
        self.paths.insert(format!("{root}.{}", path.join(".")));
    }

    fn expr(&mut self, e: &Expr, env: &HashMap<String, Ty>) -> Result<Ty, LangError> {
        let span = e.loc.0;
        Ok(match &e.kind {
            ExprKind::Collection(name) => Ty::Rows(self.collection(name, span)?),
            ExprKind::Ident(name) => env.get(name).cloned().unwrap_or(Ty::Unknown),
            ExprKind::Field(target, name) => match self.expr(target, env)? {
                Ty::Row {
                    root,
                    mut path,
                    current,
                } => {
                    path.push(name.clone());
                    let def = current.field(name).ok_or_else(|| LangError::UnknownField {
                        path: format!("{root}.{}", path.join(".")),
                        span,
                    })?;
                    self.record(root, &path);
                    match def.kind {
                        FieldKind::Ref(target) => Ty::Row {
                            root,
                            path,
                            current: target,
                        },
                        _ => Ty::Unknown,
                    }
                }
                _ => Ty::Unknown,
            },
            ExprKind::Method(target, method, args) => {
                let target = self.expr(target, env)?;
                if let MethodArgs::Preds(preds) = args {
                    for p in preds {
                        if let Ty::Rows(c) = target {
                            self.schema.resolve_path(c, &p.path).map_err(|_| {
                                LangError::UnknownField {
                                    path: format!("{c}.{}", p.path.join(".")),
                                    span,
                                }
                            })?;
                            self.record(c, &p.path);
                        }
                        self.expr(&p.value, env)?;
                    }
                }
                match (target, method) {
                    (Ty::Rows(c), Method::Filter | Method::Exclude | Method::All) => Ty::Rows(c),
                    (Ty::Rows(c), Method::Get | Method::First) => Ty::row(c),
                    _ => Ty::Unknown,
                }
            }
            ExprKind::Index(target, index) => {
                let target = self.expr(target, env)?;
                self.expr(index, env)?;
                match target {
                    Ty::Rows(c) => Ty::row(c),
                    _ => Ty::Unknown,
                }
            }
            ExprKind::Unary(_, inner) => {
                self.expr(inner, env)?;
                Ty::Unknown
            }
            ExprKind::Binary(_, l, r) => {
                self.expr(l, env)?;
                self.expr(r, env)?;
                Ty::Unknown
            }
            ExprKind::List(items) | ExprKind::Call(_, items) => {
                for i in items {
                    self.expr(i, env)?;
                }
                Ty::Unknown
            }
            _ => Ty::Unknown,
        })
    }

    fn collection(&self, name: &str, span: Span) -> Result<Collection, LangError> {
        self.schema
            .collection(name)
            .ok_or_else(|| LangError::UnknownCollection {
                name: name.to_string(),
                span,
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_source;

    fn paths(src: &str) -> Result<Vec<String>, LangError> {
        let ast = parse_source(src).unwrap();
        validate_static(&ast, &Schema).map(|s| s.into_iter().collect())
    }

    #[test]
    fn no_queries_no_paths() {
        assert_eq!(paths(r#"check "c" { return (1 < 2, map()); }"#).unwrap(), Vec::<String>::new());
    }

    #[test]
    fn unknown_collection() {
        let err = paths(r#"check "c" { return (Wombats.count() > 0, map()); }"#).unwrap_err();
        assert!(matches!(err, LangError::UnknownCollection { ref name, .. } if name == "Wombats"));
    }

    #[test]
    fn unknown_fields_carry_span() {
        let err = paths("check \"c\" {\n  return (document.colour == 1, map());\n}").unwrap_err();
        assert!(matches!(err, LangError::UnknownField { ref path, span } if path == "Documents.colour" && span.line == 2));
        assert!(paths(r#"check "c" { return (Barcodes.filter(document.weight == 1).count() > 0, map()); }"#).is_err());
    }

    #[test]
    fn paths_follow_variables_and_loops() {
        let got = paths(
            r#"check "c" {
                let evals = ElementEvaluations.filter(document == document);
                let m = map();
                for i, e in evals { m[i] = e.element.name; }
                return (evals.exclude(category iexact "x").count() > 0, m);
            }"#,
        )
        .unwrap();
        assert_eq!(
            got,
            [
                "ElementEvaluations.category",
                "ElementEvaluations.document",
                "ElementEvaluations.element",
                "ElementEvaluations.element.name"
            ]
        );
    }
}
