//! COQL: the concept-oriented query language.
//!
//! FROM names the input collections whose Cartesian product spans the
//! query space, WHERE imposes the semantic constraints, SELECT picks the
//! output structure; `(coll | cond)` filters, `->`/`.`/`<-` navigate the
//! item order, and an imperative `FORALL ... { ... RETURN ... }` form is
//! equivalent to the declarative one. Queries arrive as text, parse to
//! [`ast::Query`], get checked and desugared against a schema, and run
//! on a frozen snapshot.

pub mod ast;
pub mod check;
pub mod cube;
pub mod eval;
pub mod lexer;
pub mod parser;
pub mod pretty;

use thiserror::Error;

use crate::model::Schema;
use crate::propagate::ConstraintSet;

pub use ast::{AggFunc, Expr, PropertyDef, Query, Request};
pub use check::{check, check_expr_standalone};
pub use cube::{cube, CubeDim, CubeMeasure};
pub use eval::{
    local_possibility, register_derived, DerivedProperty, DerivedRegistry, Interpreter,
    ResultTable, Value,
};
pub use parser::{parse_expr_text, parse_property, parse_query, parse_request};
pub use pretty::{print_expr, print_query, print_request};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoqlError {
    #[error("lex error at {line}:{col}: {message}")]
    Lex { line: u32, col: u32, message: String },
    #[error("parse error at {line}:{col}: expected {expected}, found {found}")]
    Parse {
        line: u32,
        col: u32,
        expected: String,
        found: String,
    },
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("concept `{concept}` has no dimension `{dim}`")]
    UnknownDimension { concept: String, dim: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("ambiguous de-projection: {0}")]
    AmbiguousDeprojection(String),
    #[error("type error: {0}")]
    TypeMismatch(String),
    #[error("a query may use either RETURN in its body or SELECT, not both")]
    BothReturnAndSelect,
    #[error("SELECT * requires a single input collection")]
    StarNeedsSingleSource,
    #[error("concept `{concept}` has no property `{name}`")]
    UnknownProperty { concept: String, name: String },
    #[error("property `{concept}::{name}` is already defined")]
    DuplicateProperty { concept: String, name: String },
    #[error("derived property `{0}` may not call itself")]
    RecursiveProperty(String),
    #[error("property `{name}` expects {expected} arguments, got {got}")]
    ParamMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("not an elementary constraint: {0}")]
    NonLocalPredicate(String),
    #[error("dimension path mismatch: {0}")]
    PathMismatch(String),
    #[error("navigation through null along `{0}`")]
    NullNavigation(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("AVERAGE over an empty collection")]
    EmptyAverage,
    #[error("model error: {0}")]
    Model(String),
    #[error("navigation error: {0}")]
    Nav(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

/// Parse, check and evaluate query text. Bare expressions are accepted
/// too and come back as a one-by-one table. `constraints`, when given,
/// must already be propagated; impossible items are invisible.
pub fn run_query(
    schema: &Schema,
    registry: &DerivedRegistry,
    constraints: Option<&ConstraintSet>,
    text: &str,
) -> Result<ResultTable, CoqlError> {
    let interp = Interpreter::new(schema, registry).with_constraints(constraints);
    match parse_request(text)? {
        Request::Query(q) => {
            let checked = check(&q, schema, registry)?;
            interp.eval_query(&checked)
        }
        Request::Expr(e) => {
            let checked = check_expr_standalone(&e, schema, registry)?;
            let value = interp.eval_expr_standalone(&checked)?;
            Ok(ResultTable {
                columns: vec![print_expr(&e)],
                rows: vec![vec![value]],
                backing: None,
            })
        }
    }
}

#[cfg(test)]
mod tests;
