//! Canonical source rendering with the fewest parentheses that reparse to
//! the same tree.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";

pub fn pretty_print(ast: &CheckAst) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "check {} {{", quote(&ast.name));
    for stmt in &ast.statements {
        match stmt {
            Stmt::Require(r) => {
                let kw = if r.log { "log_not_applicable" } else { "not_applicable" };
                let _ = writeln!(
                    out,
                    "{INDENT}require {} else {kw}({});",
                    expr(&r.cond),
                    quote(&r.message)
                );
            }
            Stmt::Let { name, value, .. } => {
                let _ = writeln!(out, "{INDENT}let {name} = {};", expr(value));
            }
            Stmt::For {
                index,
                item,
                iter,
                body,
                ..
            } => {
                let head = format!("{INDENT}for {index}, {item} in {}", expr(iter));
                if body.is_empty() {
                    let _ = writeln!(out, "{head} {{ }}");
                    continue;
                }
                let _ = writeln!(out, "{head} {{");
                for a in body {
                    let _ = writeln!(
                        out,
                        "{INDENT}{INDENT}{}[{}] = {};",
                        a.target,
                        expr(&a.key),
                        expr(&a.value)
                    );
                }
                let _ = writeln!(out, "{INDENT}}}");
            }
            Stmt::Return { flag, details, .. } => {
                let _ = writeln!(out, "{INDENT}return ({}, {});", expr(flag), expr(details));
            }
        }
    }
    out.push_str("}\n");
    out
}

/// A string literal as written in source.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn expr(e: &Expr) -> String {
    at(e, Prec::Or)
}

fn at(e: &Expr, min: Prec) -> String {
    let text = bare(e);
    if e.kind.prec() < min {
        format!("({text})")
    } else {
        text
    }
}

fn list(items: &[Expr]) -> String {
    items.iter().map(expr).collect::<Vec<_>>().join(", ")
}

fn bare(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Null => "null".into(),
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::Int(i) => i.to_string(),
        ExprKind::Real(r) => format!("{r:?}"),
        ExprKind::Str(s) => quote(s),
        ExprKind::Ident(name) | ExprKind::Collection(name) => name.clone(),
        ExprKind::NewMap => "map()".into(),
        ExprKind::Date(y, m, d) => format!("date({y}, {m}, {d})"),
        ExprKind::List(items) => format!("[{}]", list(items)),
        ExprKind::Unary(UnaryOp::Not, inner) => format!("not {}", at(inner, Prec::Not)),
        ExprKind::Unary(UnaryOp::Neg, inner) => format!("-{}", at(inner, Prec::Neg)),
        ExprKind::Binary(op, l, r) => {
            let prec = op.prec();
            let (lp, rp) = if prec == Prec::Cmp {
                (Prec::Add, Prec::Add)
            } else {
                (prec, prec.next())
            };
            format!("{} {} {}", at(l, lp), op.symbol(), at(r, rp))
        }
        ExprKind::Field(target, name) => format!("{}.{name}", at(target, Prec::Postfix)),
        ExprKind::Method(target, method, args) => {
            let args = match args {
                MethodArgs::None => String::new(),
                MethodArgs::Preds(preds) => preds
                    .iter()
                    .map(|p| format!("{} {} {}", p.path.join("."), p.op.symbol(), expr(&p.value)))
                    .collect::<Vec<_>>()
                    .join(", "),
            };
            format!("{}.{}({args})", at(target, Prec::Postfix), method.name())
        }
        ExprKind::Index(target, index) => format!("{}[{}]", at(target, Prec::Postfix), expr(index)),
        ExprKind::Call(builtin, args) => format!("{}({})", builtin.name(), list(args)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_source;

    fn round_trip(src: &str) -> String {
        let ast = parse_source(src).unwrap();
        let printed = pretty_print(&ast);
        assert_eq!(parse_source(&printed).unwrap(), ast, "{printed}");
        printed
    }

    #[test]
    fn empty_for_body() {
        let out = round_trip(r#"check "c" { for i, x in Documents {} return (true, map()); }"#);
        assert!(out.contains("for i, x in Documents { }"));
    }

    #[test]
    fn redundant_parentheses_collapse() {
        let out = round_trip(r#"check "c" { return ((((1 + 2)) * (3)) == ((4)), map()); }"#);
        assert!(out.contains("return ((1 + 2) * 3 == 4, map());"), "{out}");
        let out = round_trip(r#"check "c" { return (1 - (2 - 3), (not (true and false)) or false); }"#);
        assert!(out.contains("1 - (2 - 3), not (true and false) or false"), "{out}");
    }

    #[test]
    fn escapes_survive() {
        round_trip("check \"a\\\"b\" { return (\"x\\n\\\\\" == \"y\", map()); }");
    }
}
