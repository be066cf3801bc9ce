//! Recursive-descent parser and structural checks.

use std::collections::HashSet;

use super::ast::*;
use super::error::LangError;
use super::lexer::{tokenize, Tok, Token};
use super::span::{Loc, Span};
use crate::store::PredOp;

/// Name of the variable bound to the document under test.
pub const DOCUMENT_VAR: &str = "document";

/// Parses and structurally validates a check from source text.
pub fn parse_source(text: &str) -> Result<CheckAst, LangError> {
    parse_check(&tokenize(text)?)
}

pub fn parse_check(tokens: &[Token]) -> Result<CheckAst, LangError> {
    let mut p = Parser { tokens, pos: 0 };
    let ast = p.check()?;
    check_structure(&ast)?;
    Ok(ast)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + offset).map(|t| &t.tok)
    }

    fn span(&self) -> Span {
        match self.tokens.get(self.pos) {
            Some(t) => t.span,
            None => self
                .tokens
                .last()
                .map(|t| Span::new(t.span.line, t.span.col + 1))
                .unwrap_or(Span::new(1, 1)),
        }
    }

    fn error<T>(&self, expected: &str) -> Result<T, LangError> {
        Err(LangError::Syntax {
            expected: expected.to_string(),
            found: self
                .peek()
                .map_or_else(|| "end of input".to_string(), ToString::to_string),
            span: self.span(),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Span, LangError> {
        let span = self.span();
        if self.eat(&tok) {
            Ok(span)
        } else {
            self.error(&tok.to_string())
        }
    }

    fn ident(&mut self) -> Result<String, LangError> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => self.error("identifier"),
        }
    }

    fn string(&mut self) -> Result<String, LangError> {
        match self.peek() {
            Some(Tok::Str(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.error("string"),
        }
    }

    fn check(&mut self) -> Result<CheckAst, LangError> {
        self.expect(Tok::Check)?;
        let name = self.string()?;
        self.expect(Tok::LBrace)?;
        let mut statements = Vec::new();
        while !self.eat(&Tok::RBrace) {
            statements.push(self.statement()?);
        }
        if self.pos < self.tokens.len() {
            return self.error("end of input");
        }
        Ok(CheckAst { name, statements })
    }

    fn statement(&mut self) -> Result<Stmt, LangError> {
        let loc = Loc(self.span());
        match self.peek() {
            Some(Tok::Require) => {
                self.pos += 1;
                let cond = self.expr()?;
                self.expect(Tok::Else)?;
                let log = match self.peek() {
                    Some(Tok::NotApplicable) => false,
                    Some(Tok::LogNotApplicable) => true,
                    _ => return self.error("`not_applicable` or `log_not_applicable`"),
                };
                self.pos += 1;
                self.expect(Tok::LParen)?;
                let message = self.string()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Require(Require {
                    cond,
                    message,
                    log,
                    loc,
                }))
            }
            Some(Tok::Let) => {
                self.pos += 1;
                let name = self.ident()?;
                self.expect(Tok::Assign)?;
                let value = self.expr()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Let { name, value, loc })
            }
            Some(Tok::For) => {
                self.pos += 1;
                let index = self.ident()?;
                self.expect(Tok::Comma)?;
                let item = self.ident()?;
                self.expect(Tok::In)?;
                let iter = self.expr()?;
                self.expect(Tok::LBrace)?;
                let mut body = Vec::new();
                while !self.eat(&Tok::RBrace) {
                    let loc = Loc(self.span());
                    let target = self.ident()?;
                    self.expect(Tok::LBracket)?;
                    let key = self.expr()?;
                    self.expect(Tok::RBracket)?;
                    self.expect(Tok::Assign)?;
                    let value = self.expr()?;
                    self.expect(Tok::Semi)?;
                    body.push(Assign {
                        target,
                        key,
                        value,
                        loc,
                    });
                }
                Ok(Stmt::For {
                    index,
                    item,
                    iter,
                    body,
                    loc,
                })
            }
            Some(Tok::Return) => {
                self.pos += 1;
                self.expect(Tok::LParen)?;
                let flag = self.expr()?;
                self.expect(Tok::Comma)?;
                let details = self.expr()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Return { flag, details, loc })
            }
            _ => self.error("`require`, `let`, `for`, `return` or `}`"),
        }
    }

    pub fn expr(&mut self) -> Result<Expr, LangError> {
        self.or()
    }

    fn binary_left(
        &mut self,
        next: fn(&mut Self) -> Result<Expr, LangError>,
        ops: &[(Tok, BinOp)],
    ) -> Result<Expr, LangError> {
        let mut lhs = next(self)?;
        'outer: loop {
            for (tok, op) in ops {
                let span = self.span();
                if self.eat(tok) {
                    let rhs = next(self)?;
                    lhs = Expr::new(ExprKind::Binary(*op, Box::new(lhs), Box::new(rhs)), span);
                    continue 'outer;
                }
            }
            return Ok(lhs);
        }
    }

    fn or(&mut self) -> Result<Expr, LangError> {
        self.binary_left(Self::and, &[(Tok::Or, BinOp::Or)])
    }

    fn and(&mut self) -> Result<Expr, LangError> {
        self.binary_left(Self::not, &[(Tok::And, BinOp::And)])
    }

    fn not(&mut self) -> Result<Expr, LangError> {
        let span = self.span();
        if self.eat(&Tok::Not) {
            let inner = self.not()?;
            return Ok(Expr::new(ExprKind::Unary(UnaryOp::Not, Box::new(inner)), span));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr, LangError> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Some(Tok::EqEq) => BinOp::Eq,
            Some(Tok::NotEq) => BinOp::Ne,
            Some(Tok::Lt) => BinOp::Lt,
            Some(Tok::Le) => BinOp::Le,
            Some(Tok::Gt) => BinOp::Gt,
            Some(Tok::Ge) => BinOp::Ge,
            Some(Tok::IExact) => BinOp::IExact,
            Some(Tok::In) => BinOp::In,
            _ => return Ok(lhs),
        };
        let span = self.span();
        self.pos += 1;
        let rhs = self.additive()?;
        Ok(Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span))
    }

    fn additive(&mut self) -> Result<Expr, LangError> {
        self.binary_left(
            Self::multiplicative,
            &[(Tok::Plus, BinOp::Add), (Tok::Minus, BinOp::Sub)],
        )
    }

    fn multiplicative(&mut self) -> Result<Expr, LangError> {
        self.binary_left(Self::negation, &[(Tok::Star, BinOp::Mul), (Tok::Slash, BinOp::Div)])
    }

    fn negation(&mut self) -> Result<Expr, LangError> {
        let span = self.span();
        if self.eat(&Tok::Minus) {
            let inner = self.negation()?;
            return Ok(Expr::new(ExprKind::Unary(UnaryOp::Neg, Box::new(inner)), span));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, LangError> {
        let mut e = self.primary()?;
        loop {
            let span = self.span();
            if self.eat(&Tok::Dot) {
                let name = self.ident()?;
                if self.peek() == Some(&Tok::LParen) {
                    let method = Method::from_name(&name).ok_or_else(|| {
                        LangError::structure(format!("unknown method `{name}`"), span)
                    })?;
                    let args = self.method_args(method)?;
                    e = Expr::new(ExprKind::Method(Box::new(e), method, args), span);
                } else {
                    e = Expr::new(ExprKind::Field(Box::new(e), name), span);
                }
            } else if self.eat(&Tok::LBracket) {
                let index = self.expr()?;
                self.expect(Tok::RBracket)?;
                e = Expr::new(ExprKind::Index(Box::new(e), Box::new(index)), span);
            } else {
                return Ok(e);
            }
        }
    }

    fn method_args(&mut self, method: Method) -> Result<MethodArgs, LangError> {
        self.expect(Tok::LParen)?;
        if !method.takes_predicates() {
            let span = self.span();
            if !self.eat(&Tok::RParen) {
                return Err(LangError::structure(
                    format!("`{}()` takes no arguments", method.name()),
                    span,
                ));
            }
            return Ok(MethodArgs::None);
        }
        let mut preds = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                preds.push(self.pred_arg()?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        Ok(MethodArgs::Preds(preds))
    }

    fn pred_arg(&mut self) -> Result<PredArg, LangError> {
        let mut path = vec![self.ident()?];
        while self.eat(&Tok::Dot) {
            path.push(self.ident()?);
        }
        let op = match self.peek() {
            Some(Tok::EqEq) => PredOp::Eq,
            Some(Tok::NotEq) => PredOp::Ne,
            Some(Tok::Lt) => PredOp::Lt,
            Some(Tok::Le) => PredOp::Lte,
            Some(Tok::Gt) => PredOp::Gt,
            Some(Tok::Ge) => PredOp::Gte,
            Some(Tok::In) => PredOp::In,
            Some(Tok::IExact) => PredOp::IExact,
            Some(Tok::IsNull) => PredOp::IsNull,
            _ => return self.error("predicate operator"),
        };
        self.pos += 1;
        let value = self.expr()?;
        Ok(PredArg { path, op, value })
    }

    fn call_args(&mut self) -> Result<Vec<Expr>, LangError> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                args.push(self.expr()?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        Ok(args)
    }

    fn int(&mut self) -> Result<i64, LangError> {
        match self.peek() {
            Some(Tok::Int(i)) => {
                let i = *i;
                self.pos += 1;
                Ok(i)
            }
            _ => self.error("integer"),
        }
    }

    fn primary(&mut self) -> Result<Expr, LangError> {
        let span = self.span();
        let Some(tok) = self.peek().cloned() else {
            return self.error("expression");
        };
        let kind = match tok {
            Tok::Null => ExprKind::Null,
            Tok::True => ExprKind::Bool(true),
            Tok::False => ExprKind::Bool(false),
            Tok::Int(i) => ExprKind::Int(i),
            Tok::Real(r) => ExprKind::Real(r),
            Tok::Str(s) => ExprKind::Str(s),
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(inner);
            }
            Tok::LBracket => {
                self.pos += 1;
                let mut items = Vec::new();
                if !self.eat(&Tok::RBracket) {
                    loop {
                        items.push(self.expr()?);
                        if self.eat(&Tok::RBracket) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                return Ok(Expr::new(ExprKind::List(items), span));
            }
            Tok::Map => {
                self.pos += 1;
                self.expect(Tok::LParen)?;
                self.expect(Tok::RParen)?;
                return Ok(Expr::new(ExprKind::NewMap, span));
            }
            Tok::Date => {
                self.pos += 1;
                self.expect(Tok::LParen)?;
                let y = self.int()?;
                self.expect(Tok::Comma)?;
                let m = self.int()?;
                self.expect(Tok::Comma)?;
                let d = self.int()?;
                self.expect(Tok::RParen)?;
                if calendar_date(y, m, d).is_none() {
                    return Err(LangError::Syntax {
                        expected: "a valid calendar date".into(),
                        found: format!("date({y}, {m}, {d})"),
                        span,
                    });
                }
                return Ok(Expr::new(ExprKind::Date(y, m, d), span));
            }
            Tok::Ident(name) => {
                if self.peek_at(1) == Some(&Tok::LParen) {
                    self.pos += 1;
                    let builtin = Builtin::from_name(&name).ok_or_else(|| {
                        LangError::structure(format!("unknown function `{name}`"), span)
                    })?;
                    let args = self.call_args()?;
                    let (min, max) = builtin.arity();
                    if args.len() < min || args.len() > max {
                        return Err(LangError::structure(
                            format!("`{name}` called with {} arguments", args.len()),
                            span,
                        ));
                    }
                    return Ok(Expr::new(ExprKind::Call(builtin, args), span));
                }
                if name.starts_with(|c: char| c.is_uppercase()) {
                    ExprKind::Collection(name)
                } else {
                    ExprKind::Ident(name)
                }
            }
            _ => return self.error("expression"),
        };
        self.pos += 1;
        Ok(Expr::new(kind, span))
    }
}

pub(crate) fn calendar_date(y: i64, m: i64, d: i64) -> Option<chrono::NaiveDate> {
    chrono::NaiveDate::from_ymd_opt(
        i32::try_from(y).ok()?,
        u32::try_from(m).ok()?,
        u32::try_from(d).ok()?,
    )
}

/// Statement order, a single final `return`, and identifiers defined
/// before use.
fn check_structure(ast: &CheckAst) -> Result<(), LangError> {
    let mut seen_body = false;
    let mut returned = false;
    for stmt in &ast.statements {
        let span = stmt.loc().0;
        if returned {
            return Err(LangError::structure("statement after `return`", span));
        }
        match stmt.kind() {
            StmtKind::Require if seen_body => {
                return Err(LangError::structure(
                    "`require` must precede every `let` and `for`",
                    span,
                ))
            }
            StmtKind::Require => {}
            StmtKind::Let | StmtKind::For => seen_body = true,
            StmtKind::Return => returned = true,
        }
    }
    if !returned {
        let span = ast
            .statements
            .last()
            .map_or(Span::new(1, 1), |s| s.loc().0);
        return Err(LangError::structure("check has no `return`", span));
    }

    let mut scope: HashSet<String> = HashSet::from([DOCUMENT_VAR.to_string()]);
    for stmt in &ast.statements {
        match stmt {
            Stmt::Require(r) => defined(&r.cond, &scope)?,
            Stmt::Let { name, value, .. } => {
                defined(value, &scope)?;
                scope.insert(name.clone());
            }
            Stmt::For {
                index,
                item,
                iter,
                body,
                ..
            } => {
                defined(iter, &scope)?;
                let mut inner = scope.clone();
                inner.insert(index.clone());
                inner.insert(item.clone());
                for a in body {
                    if !inner.contains(&a.target) {
                        return Err(LangError::structure(
                            format!("assignment to undefined `{}`", a.target),
                            a.loc.0,
                        ));
                    }
                    defined(&a.key, &inner)?;
                    defined(&a.value, &inner)?;
                }
            }
            Stmt::Return { flag, details, .. } => {
                defined(flag, &scope)?;
                defined(details, &scope)?;
            }
        }
    }
    Ok(())
}

fn defined(e: &Expr, scope: &HashSet<String>) -> Result<(), LangError> {
    match &e.kind {
        ExprKind::Ident(name) if !scope.contains(name) => Err(LangError::structure(
            format!("`{name}` is used before it is defined"),
            e.loc.0,
        )),
        ExprKind::List(items) | ExprKind::Call(_, items) => {
            items.iter().try_for_each(|i| defined(i, scope))
        }
        ExprKind::Unary(_, inner) | ExprKind::Field(inner, _) => defined(inner, scope),
        ExprKind::Binary(_, l, r) | ExprKind::Index(l, r) => {
            defined(l, scope)?;
            defined(r, scope)
        }
        ExprKind::Method(target, _, args) => {
            defined(target, scope)?;
            if let MethodArgs::Preds(preds) = args {
                for p in preds {
                    defined(&p.value, scope)?;
                }
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn structure_err(src: &str) -> String {
        match parse_source(src) {
            Err(LangError::Structure { message, .. }) => message,
            other => panic!("expected structure error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_check() {
        let ast = parse_source(r#"check "c" { return (false, map()); }"#).unwrap();
        assert_eq!(ast.name, "c");
        assert_eq!(ast.statements.len(), 1);
    }

    #[test]
    fn structure_violations() {
        assert!(structure_err(r#"check "c" { let x = 1; }"#).contains("no `return`"));
        assert!(structure_err(r#"check "c" { let x = 1; require true else not_applicable("m"); return (true, map()); }"#)
            .contains("precede"));
        assert!(structure_err(r#"check "c" { return (true, map()); return (true, map()); }"#)
            .contains("after"));
        assert!(structure_err(r#"check "c" { return (y, map()); }"#).contains("`y`"));
        assert!(structure_err(r#"check "c" { return (frobnicate(1), map()); }"#).contains("frobnicate"));
        assert!(structure_err(r#"check "c" { return (Documents.sort(), map()); }"#).contains("sort"));
        assert!(structure_err(r#"check "c" { for i, x in Documents { y[i] = x; } return (true, map()); }"#)
            .contains("`y`"));
    }

    #[test]
    fn loop_variables_do_not_escape() {
        let src = r#"check "c" { let m = map(); for i, x in Documents { m[i] = x; } return (x, m); }"#;
        assert!(structure_err(src).contains("`x`"));
    }

    #[test]
    fn syntax_errors_name_expectation() {
        match parse_source(r#"check "c" { return (true map()); }"#) {
            Err(LangError::Syntax { expected, found, span }) => {
                assert_eq!(expected, "`,`");
                assert_eq!(found, "`map`");
                assert_eq!(span, Span::new(1, 26));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_source(r#"check "c" { return (date(2021, 2, 30), map()); }"#),
            Err(LangError::Syntax { .. })
        ));
        assert!(matches!(
            parse_source(r#"check "c" { return (1 == 2 == 3, map()); }"#),
            Err(LangError::Syntax { .. })
        ));
        assert!(parse_source(r#"check "c" { return (true, map()); } extra"#).is_err());
    }

    #[test]
    fn precedence() {
        let ast = parse_source(r#"check "c" { return (not 1 + 2 * -3 == 4 and true or false, map()); }"#).unwrap();
        let Stmt::Return { flag, .. } = &ast.statements[0] else { panic!() };
        let ExprKind::Binary(BinOp::Or, lhs, _) = &flag.kind else { panic!("{flag:?}") };
        let ExprKind::Binary(BinOp::And, lhs, _) = &lhs.kind else { panic!() };
        let ExprKind::Unary(UnaryOp::Not, inner) = &lhs.kind else { panic!() };
        let ExprKind::Binary(BinOp::Eq, sum, _) = &inner.kind else { panic!() };
        let ExprKind::Binary(BinOp::Add, _, product) = &sum.kind else { panic!() };
        assert!(matches!(&product.kind, ExprKind::Binary(BinOp::Mul, _, n) if matches!(n.kind, ExprKind::Unary(UnaryOp::Neg, _))));
    }
}
