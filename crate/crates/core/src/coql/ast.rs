//! COQL abstract syntax. Identifier nodes keep their source position for
//! error messages; equality ignores it so pretty-printed round trips
//! compare structurally.

use std::fmt;
use std::hash::{Hash, Hasher};

#[derive(Debug, Clone, Eq)]
pub struct Ident {
    pub name: String,
    pub line: u32,
    pub col: u32,
}

impl Ident {
    pub fn new(name: &str) -> Self {
        Ident {
            name: name.to_string(),
            line: 0,
            col: 0,
        }
    }
}

impl PartialEq for Ident {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Hash for Ident {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state);
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
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
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn text(self) -> &'static str {
        match self {
            BinOp::Or => "OR",
            BinOp::And => "AND",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggFunc {
    Count,
    Sum,
    Average,
    Size,
}

impl AggFunc {
    pub fn text(self) -> &'static str {
        match self {
            AggFunc::Count => "COUNT",
            AggFunc::Sum => "SUM",
            AggFunc::Average => "AVERAGE",
            AggFunc::Size => "SIZE",
        }
    }
}

/// An element of a de-projection chain, written `<- name` or
/// `<- ( ... )`. Bare names are dimension labels, except the final one
/// which names the target collection; parenthesized atoms are always
/// targets closing one hop.
#[derive(Debug, Clone, PartialEq)]
pub enum DeprojItem {
    Name(Ident),
    Target(Expr),
}

/// One postfix navigation step.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    /// `-> dim`: projection (deduplicating on collections).
    Project(Ident),
    /// `. dim`: member access; on collections keeps one output per input.
    Dot(Ident),
    /// `.< e1, e2, ... >`: per-member computed values.
    DotTuple(Vec<Expr>),
    /// `<- d1 <- d2 <- ... <- target`: de-projection chain.
    Deproject(Vec<DeprojItem>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(i64),
    /// Decimal literal kept in its source spelling.
    Dec(String),
    Str(String),
    /// Unresolved name: variable, concept, or (after checking) never a
    /// bare dimension — the checker rewrites those to `this` steps.
    Name(Ident),
    This,
    /// `( source var? | condition )`
    Filter {
        source: Box<Expr>,
        var: Option<Ident>,
        cond: Box<Expr>,
    },
    /// `[ chain AND chain ... ]`: intersection of de-projections ending
    /// in one fact concept.
    MultiDeproject(Vec<Expr>),
    Subquery(Box<Query>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Not(Box<Expr>),
    Neg(Box<Expr>),
    Aggregate {
        func: AggFunc,
        arg: Box<Expr>,
    },
    /// Derived-property call `recv.name(args)`.
    Call {
        recv: Box<Expr>,
        name: Ident,
        args: Vec<Expr>,
    },
    Step {
        recv: Box<Expr>,
        step: Step,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum DeclType {
    Collection(Option<Ident>),
    Item,
    Concept(Ident),
    Double,
    Integer,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Decl {
        ty: DeclType,
        name: Ident,
        value: Expr,
    },
    If {
        cond: Expr,
        then_return: Vec<Expr>,
    },
    Return(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub expr: Expr,
    pub var: Option<Ident>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectItem {
    pub expr: Expr,
    pub alias: Option<Ident>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelectClause {
    Star,
    Exprs(Vec<SelectItem>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    /// True for the imperative `FORALL sources { ... }` form.
    pub forall: bool,
    pub sources: Vec<Source>,
    pub body: Vec<Stmt>,
    pub where_clause: Option<Expr>,
    pub select: Option<SelectClause>,
}

/// A parsed derived-property definition:
/// `Owner::name(Type p, ...) { body }`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyDef {
    pub owner: Ident,
    pub name: Ident,
    pub params: Vec<(Ident, Ident)>,
    pub body: Vec<Stmt>,
}

/// Text accepted by the query entry points: a full query or a bare
/// expression evaluated in an empty scope.
#[derive(Debug, Clone, PartialEq)]
pub enum Request {
    Query(Query),
    Expr(Expr),
}
