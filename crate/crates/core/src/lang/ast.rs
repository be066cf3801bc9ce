//! Syntax tree of a check. Locations are carried for diagnostics but are
//! ignored by equality.

use super::span::Loc;
use crate::store::PredOp;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckAst {
    pub name: String,
    pub statements: Vec<Stmt>,
}

impl CheckAst {
    pub fn requires(&self) -> impl Iterator<Item = &Require> {
        self.statements.iter().filter_map(|s| match s {
            Stmt::Require(r) => Some(r),
            _ => None,
        })
    }

    pub fn count(&self, kind: StmtKind) -> usize {
        self.statements.iter().filter(|s| s.kind() == kind).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StmtKind {
    Require,
    Let,
    For,
    Return,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Require(Require),
    Let {
        name: String,
        value: Expr,
        loc: Loc,
    },
    For {
        index: String,
        item: String,
        iter: Expr,
        body: Vec<Assign>,
        loc: Loc,
    },
    Return {
        flag: Expr,
        details: Expr,
        loc: Loc,
    },
}

impl Stmt {
    pub fn kind(&self) -> StmtKind {
        match self {
            Stmt::Require(_) => StmtKind::Require,
            Stmt::Let { .. } => StmtKind::Let,
            Stmt::For { .. } => StmtKind::For,
            Stmt::Return { .. } => StmtKind::Return,
        }
    }

    pub fn loc(&self) -> Loc {
        match self {
            Stmt::Require(r) => r.loc,
            Stmt::Let { loc, .. } | Stmt::For { loc, .. } | Stmt::Return { loc, .. } => *loc,
        }
    }
}

/// `require cond else not_applicable("message");`. With `log` set the
/// statement was written as `log_not_applicable` and never aborts.
#[derive(Debug, Clone, PartialEq)]
pub struct Require {
    pub cond: Expr,
    pub message: String,
    pub log: bool,
    pub loc: Loc,
}

/// `target[key] = value;` inside a `for` body.
#[derive(Debug, Clone, PartialEq)]
pub struct Assign {
    pub target: String,
    pub key: Expr,
    pub value: Expr,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub loc: Loc,
}

impl Expr {
    pub fn new(kind: ExprKind, loc: impl Into<Loc>) -> Self {
        Self {
            kind,
            loc: loc.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    IExact,
    In,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::IExact => "iexact",
            BinOp::In => "in",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    pub fn prec(self) -> Prec {
        match self {
            BinOp::Or => Prec::Or,
            BinOp::And => Prec::And,
            BinOp::Add | BinOp::Sub => Prec::Add,
            BinOp::Mul | BinOp::Div => Prec::Mul,
            _ => Prec::Cmp,
        }
    }
}

/// Binding strength, loosest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Prec {
    Or,
    And,
    Not,
    Cmp,
    Add,
    Mul,
    Neg,
    Postfix,
    Primary,
}

impl Prec {
    pub fn next(self) -> Prec {
        match self {
            Prec::Or => Prec::And,
            Prec::And => Prec::Not,
            Prec::Not => Prec::Cmp,
            Prec::Cmp => Prec::Add,
            Prec::Add => Prec::Mul,
            Prec::Mul => Prec::Neg,
            Prec::Neg => Prec::Postfix,
            Prec::Postfix | Prec::Primary => Prec::Primary,
        }
    }
}

/// `path op value` inside `filter`, `exclude` and `get`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredArg {
    pub path: Vec<String>,
    pub op: PredOp,
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MethodArgs {
    Preds(Vec<PredArg>),
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Null,
    Bool(bool),
    Int(i64),
    Real(f64),
    Str(String),
    Ident(String),
    Collection(String),
    NewMap,
    Date(i64, i64, i64),
    List(Vec<Expr>),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Field(Box<Expr>, String),
    Method(Box<Expr>, Method, MethodArgs),
    Index(Box<Expr>, Box<Expr>),
    Call(Builtin, Vec<Expr>),
}

impl ExprKind {
    pub fn prec(&self) -> Prec {
        match self {
            ExprKind::Unary(UnaryOp::Not, _) => Prec::Not,
            ExprKind::Unary(UnaryOp::Neg, _) => Prec::Neg,
            ExprKind::Binary(op, ..) => op.prec(),
            ExprKind::Field(..) | ExprKind::Method(..) | ExprKind::Index(..) => Prec::Postfix,
            _ => Prec::Primary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Filter,
    Exclude,
    Get,
    Count,
    First,
    All,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Filter,
        Method::Exclude,
        Method::Get,
        Method::Count,
        Method::First,
        Method::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Filter => "filter",
            Method::Exclude => "exclude",
            Method::Get => "get",
            Method::Count => "count",
            Method::First => "first",
            Method::All => "all",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    /// Whether the method takes `path op value` arguments.
    pub fn takes_predicates(self) -> bool {
        matches!(self, Method::Filter | Method::Exclude | Method::Get)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Len,
    Abs,
    Format,
    Year,
    Month,
    Day,
    LinearFit,
    Number,
}

impl Builtin {
    pub const ALL: [Builtin; 8] = [
        Builtin::Len,
        Builtin::Abs,
        Builtin::Format,
        Builtin::Year,
        Builtin::Month,
        Builtin::Day,
        Builtin::LinearFit,
        Builtin::Number,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Len => "len",
            Builtin::Abs => "abs",
            Builtin::Format => "format",
            Builtin::Year => "year",
            Builtin::Month => "month",
            Builtin::Day => "day",
            Builtin::LinearFit => "linear_fit",
            Builtin::Number => "number",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }

    /// Accepted argument counts as `(min, max)`.
    pub fn arity(self) -> (usize, usize) {
        match self {
            Builtin::Format => (1, usize::MAX),
            _ => (1, 1),
        }
    }
}
