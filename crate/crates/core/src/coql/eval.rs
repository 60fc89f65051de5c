//! COQL evaluation: naive nested loops over frozen schema snapshots.
//!
//! FROM builds the Cartesian product of its input collections; the body
//! runs per tuple establishing local bindings; WHERE keeps satisfying
//! tuples; SELECT (or RETURN in the imperative form) emits one row each.
//! A query-scoped constraint set, when supplied, hides impossible items
//! from every concept access, which matches evaluating against a copy of
//! the model with those items deleted.

use std::fmt;

use rust_decimal::Decimal;

use crate::model::{ConceptId, ConceptKind, ItemRef, Schema};
use crate::navigate::{self, Collection};
use crate::propagate::{ConstraintSet, Possibility};
use crate::value::{Literal, ValueKind};

use super::ast::*;
use super::check::Checker;
use super::pretty::print_expr;
use super::CoqlError;

/// Runtime value of a COQL expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Dec(Decimal),
    Str(String),
    Item(ItemRef),
    Coll(Collection),
    /// Collection of computed scalars (dot-tuple results, scalar
    /// subquery columns); duplicates preserved.
    List(Vec<Value>),
}

impl Value {
    fn type_name(&self) -> &'static str {
        match self {
            Value::Null => "null",
            Value::Bool(_) => "boolean",
            Value::Int(_) => "integer",
            Value::Dec(_) => "decimal",
            Value::Str(_) => "string",
            Value::Item(_) => "item",
            Value::Coll(_) => "collection",
            Value::List(_) => "collection",
        }
    }

    /// Display form used by tables and the shell; items print their key.
    pub fn render(&self, schema: &Schema) -> String {
        match self {
            Value::Null => String::new(),
            Value::Bool(b) => b.to_string(),
            Value::Int(v) => v.to_string(),
            Value::Dec(d) => d.to_string(),
            Value::Str(s) => s.clone(),
            Value::Item(i) => schema.key_of(*i).to_string(),
            Value::Coll(c) => {
                let keys: Vec<&str> = c.members.iter().map(|m| schema.key_of(*m)).collect();
                format!("{{{}}}", keys.join(", "))
            }
            Value::List(vs) => {
                let parts: Vec<String> = vs.iter().map(|v| v.render(schema)).collect();
                format!("{{{}}}", parts.join(", "))
            }
        }
    }

    pub fn to_json(&self, schema: &Schema) -> serde_json::Value {
        match self {
            Value::Null => serde_json::Value::Null,
            Value::Bool(b) => serde_json::Value::Bool(*b),
            Value::Int(v) => serde_json::Value::from(*v),
            Value::Dec(d) => serde_json::Value::String(d.to_string()),
            Value::Str(s) => serde_json::Value::String(s.clone()),
            Value::Item(i) => serde_json::Value::String(schema.key_of(*i).to_string()),
            Value::Coll(c) => serde_json::Value::Array(
                c.members
                    .iter()
                    .map(|m| serde_json::Value::String(schema.key_of(*m).to_string()))
                    .collect(),
            ),
            Value::List(vs) => {
                serde_json::Value::Array(vs.iter().map(|v| v.to_json(schema)).collect())
            }
        }
    }
}

/// Rectangular query result. When the rows are backed by items of one
/// concept (star selects, item-valued single columns) the backing
/// collection is kept so the table can feed other queries.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub backing: Option<Collection>,
}

impl ResultTable {
    /// Canonical sorted row texts, used to compare result sets.
    pub fn row_set(&self, schema: &Schema) -> Vec<String> {
        let mut rows: Vec<String> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| v.render(schema))
                    .collect::<Vec<_>>()
                    .join("\t")
            })
            .collect();
        rows.sort();
        rows
    }

    pub fn to_tsv(&self, schema: &Schema) -> String {
        let mut out = self.columns.join("\t");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.render(schema)).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }

    pub fn to_json_lines(&self, schema: &Schema) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let mut obj = serde_json::Map::new();
            for (name, value) in self.columns.iter().zip(row) {
                obj.insert(name.clone(), value.to_json(schema));
            }
            out.push_str(&serde_json::Value::Object(obj).to_string());
            out.push('\n');
        }
        out
    }

    pub fn to_aligned(&self, schema: &Schema) -> String {
        let rendered: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(|v| v.render(schema)).collect())
            .collect();
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for row in &rendered {
            for (i, cell) in row.iter().enumerate() {
                widths[i] = widths[i].max(cell.len());
            }
        }
        let mut out = String::new();
        let fmt_row = |cells: &[String], widths: &[usize]| -> String {
            cells
                .iter()
                .enumerate()
                .map(|(i, c)| format!("{:<width$}", c, width = widths[i]))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let header: Vec<String> = self.columns.clone();
        out.push_str(&fmt_row(&header, &widths));
        out.push('\n');
        out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len().saturating_sub(1))));
        out.push('\n');
        for row in &rendered {
            out.push_str(&fmt_row(row, &widths));
            out.push('\n');
        }
        out
    }
}

/// A derived multi-valued property: a named query body evaluated with
/// `this` bound to the owning item.
#[derive(Debug, Clone)]
pub struct DerivedProperty {
    pub owner: ConceptId,
    pub name: String,
    pub params: Vec<(String, ConceptId)>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, Default)]
pub struct DerivedRegistry {
    props: Vec<DerivedProperty>,
}

impl DerivedRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Properties are keyed by owner, name and arity, so `orders()` and
    /// `orders(Categories c)` coexist.
    pub fn lookup(&self, owner: ConceptId, name: &str, arity: usize) -> Option<&DerivedProperty> {
        self.props
            .iter()
            .find(|p| p.owner == owner && p.name == name && p.params.len() == arity)
    }

    pub fn lookup_any(&self, owner: ConceptId, name: &str) -> Option<&DerivedProperty> {
        self.props.iter().find(|p| p.owner == owner && p.name == name)
    }

    pub fn len(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }
}

/// Register a derived property. The body is checked now, against the
/// already-registered properties only, so recursion (direct or mutual)
/// cannot be expressed.
pub fn register_derived(
    registry: &mut DerivedRegistry,
    schema: &Schema,
    def: &PropertyDef,
) -> Result<(), CoqlError> {
    let owner = schema
        .concept_by_name(&def.owner.name)
        .ok_or_else(|| CoqlError::UnknownConcept(def.owner.name.clone()))?;
    if registry.lookup(owner, &def.name.name, def.params.len()).is_some() {
        return Err(CoqlError::DuplicateProperty {
            concept: def.owner.name.clone(),
            name: def.name.name.clone(),
        });
    }
    let mut params = Vec::new();
    for (ty, name) in &def.params {
        let concept = schema
            .concept_by_name(&ty.name)
            .ok_or_else(|| CoqlError::UnknownConcept(ty.name.clone()))?;
        params.push((name.name.clone(), concept));
    }
    let body = def.body.clone();
    let mut returns = 0usize;
    for stmt in &body {
        match stmt {
            Stmt::Return(exprs) | Stmt::If { then_return: exprs, .. } => {
                returns += 1;
                if exprs.len() != 1 {
                    return Err(CoqlError::TypeMismatch(format!(
                        "property `{}` must RETURN a single value",
                        def.name.name
                    )));
                }
            }
            Stmt::Decl { .. } => {}
        }
    }
    if returns == 0 {
        return Err(CoqlError::TypeMismatch(format!(
            "property `{}` has no RETURN",
            def.name.name
        )));
    }
    // Check the body with `this` and the parameters in scope. A call to
    // the property being defined is still unknown here, which is exactly
    // how recursive definitions get rejected.
    let mut checker = Checker::new(schema, registry);
    checker.bind("this", owner);
    for (name, concept) in &params {
        checker.bind(name, *concept);
    }
    let mut probe = Query {
        forall: true,
        sources: Vec::new(),
        body,
        where_clause: None,
        select: None,
    };
    checker
        .check_query(&mut probe)
        .map_err(reject_self_call(&def.name.name))?;
    let body = probe.body;
    registry.props.push(DerivedProperty {
        owner,
        name: def.name.name.clone(),
        params,
        body,
    });
    Ok(())
}

fn reject_self_call(name: &str) -> impl Fn(CoqlError) -> CoqlError + '_ {
    move |err| match &err {
        CoqlError::UnknownProperty { name: n, .. } if n == name => {
            CoqlError::RecursiveProperty(name.to_string())
        }
        _ => err,
    }
}

/// Query interpreter over a frozen schema snapshot.
pub struct Interpreter<'a> {
    pub schema: &'a Schema,
    pub registry: &'a DerivedRegistry,
    /// Query-scoped constraints, already propagated; impossible items are
    /// invisible to every concept access.
    pub constraints: Option<&'a ConstraintSet>,
}

#[derive(Debug, Default)]
struct Env {
    vars: Vec<(String, Value)>,
}

impl Env {
    fn bind(&mut self, name: &str, value: Value) {
        self.vars.push((name.to_string(), value));
    }

    fn lookup(&self, name: &str) -> Option<&Value> {
        self.vars.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    fn mark(&self) -> usize {
        self.vars.len()
    }

    fn reset(&mut self, mark: usize) {
        self.vars.truncate(mark);
    }
}

impl<'a> Interpreter<'a> {
    pub fn new(schema: &'a Schema, registry: &'a DerivedRegistry) -> Self {
        Interpreter {
            schema,
            registry,
            constraints: None,
        }
    }

    pub fn with_constraints(mut self, cs: Option<&'a ConstraintSet>) -> Self {
        self.constraints = cs;
        self
    }

    pub(crate) fn concept_collection(&self, concept: ConceptId) -> Collection {
        let mut members: Vec<ItemRef> = self.schema.items(concept).collect();
        if let Some(cs) = self.constraints {
            members.retain(|m| cs.is_possible(*m));
        }
        Collection::new(concept, members)
    }

    pub fn eval_query(&self, q: &Query) -> Result<ResultTable, CoqlError> {
        let mut env = Env::default();
        self.eval_query_env(q, &mut env)
    }

    pub fn eval_expr_standalone(&self, e: &Expr) -> Result<Value, CoqlError> {
        let mut env = Env::default();
        self.eval_expr(e, &mut env)
    }

    /// Evaluate an expression with `this` bound to one item.
    pub(crate) fn eval_with_this(&self, e: &Expr, item: ItemRef) -> Result<Value, CoqlError> {
        let mut env = Env::default();
        env.bind("this", Value::Item(item));
        self.eval_expr(e, &mut env)
    }

    /// True when a checked boolean expression holds for the item.
    pub(crate) fn item_satisfies(&self, cond: &Expr, item: ItemRef) -> Result<bool, CoqlError> {
        Ok(truthy(&self.eval_with_this(cond, item)?))
    }

    fn eval_query_env(&self, q: &Query, env: &mut Env) -> Result<ResultTable, CoqlError> {
        // Evaluate sources once, before the product loop.
        let mut sources: Vec<(Option<String>, Collection)> = Vec::new();
        for source in &q.sources {
            let value = self.eval_expr(&source.expr, env)?;
            let coll = self.to_collection(value)?;
            sources.push((source.var.as_ref().map(|v| v.name.clone()), coll));
        }

        let columns = self.result_columns(q, &sources)?;
        let mut rows: Vec<Vec<Value>> = Vec::new();
        let mut backing: Vec<ItemRef> = Vec::new();
        let mut backed = matches!(q.select, None | Some(SelectClause::Star)) && sources.len() == 1;

        let mut tuple: Vec<ItemRef> = Vec::new();
        self.product(q, &sources, 0, &mut tuple, env, &mut rows, &mut backing, &mut backed)?;

        Ok(ResultTable {
            columns,
            rows,
            backing: if backed {
                sources
                    .first()
                    .map(|(_, coll)| Collection::new(coll.concept, backing))
            } else {
                None
            },
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn product(
        &self,
        q: &Query,
        sources: &[(Option<String>, Collection)],
        depth: usize,
        tuple: &mut Vec<ItemRef>,
        env: &mut Env,
        rows: &mut Vec<Vec<Value>>,
        backing: &mut Vec<ItemRef>,
        backed: &mut bool,
    ) -> Result<(), CoqlError> {
        if depth == sources.len() {
            return self.emit(q, sources, tuple, env, rows, backing, backed);
        }
        let members = sources[depth].1.members.clone();
        for member in members {
            tuple.push(member);
            self.product(q, sources, depth + 1, tuple, env, rows, backing, backed)?;
            tuple.pop();
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn emit(
        &self,
        q: &Query,
        sources: &[(Option<String>, Collection)],
        tuple: &[ItemRef],
        env: &mut Env,
        rows: &mut Vec<Vec<Value>>,
        backing: &mut Vec<ItemRef>,
        backed: &mut bool,
    ) -> Result<(), CoqlError> {
        let mark = env.mark();
        for ((var, _), item) in sources.iter().zip(tuple) {
            if let Some(name) = var {
                env.bind(name, Value::Item(*item));
            }
        }
        if sources.len() == 1 {
            env.bind("this", Value::Item(tuple[0]));
        }

        // Body statements: declarations bind, RETURNs emit rows.
        let mut returned: Vec<Vec<Value>> = Vec::new();
        for stmt in &q.body {
            match stmt {
                Stmt::Decl { name, value, .. } => {
                    let v = self.eval_expr(value, env)?;
                    env.bind(&name.name, v);
                }
                Stmt::Return(exprs) => {
                    let mut row = Vec::new();
                    for e in exprs {
                        row.push(self.eval_expr(e, env)?);
                    }
                    returned.push(row);
                }
                Stmt::If { cond, then_return } => {
                    if truthy(&self.eval_expr(cond, env)?) {
                        let mut row = Vec::new();
                        for e in then_return {
                            row.push(self.eval_expr(e, env)?);
                        }
                        returned.push(row);
                    }
                }
            }
        }

        let keep = match &q.where_clause {
            Some(cond) => truthy(&self.eval_expr(cond, env)?),
            None => true,
        };
        if keep {
            match &q.select {
                Some(SelectClause::Star) => {
                    let item = tuple[0];
                    let cdef = self.schema.concept(item.concept);
                    let mut row = Vec::new();
                    for idx in 0..cdef.dims.len() {
                        row.push(match self.schema.slots_of(item)[idx] {
                            Some(r) => self.item_value(r),
                            None => Value::Null,
                        });
                    }
                    rows.push(row);
                    backing.push(item);
                }
                Some(SelectClause::Exprs(items)) => {
                    let mut row = Vec::new();
                    for item in items {
                        row.push(self.eval_expr(&item.expr, env)?);
                    }
                    rows.push(row);
                }
                None => {
                    if q.body.iter().any(|s| matches!(s, Stmt::Return(_) | Stmt::If { .. })) {
                        rows.extend(returned);
                    } else {
                        rows.push(tuple.iter().map(|i| Value::Item(*i)).collect());
                        if sources.len() == 1 {
                            backing.push(tuple[0]);
                        } else {
                            *backed = false;
                        }
                    }
                }
            }
        }
        env.reset(mark);
        Ok(())
    }

    fn result_columns(
        &self,
        q: &Query,
        sources: &[(Option<String>, Collection)],
    ) -> Result<Vec<String>, CoqlError> {
        let raw: Vec<String> = match &q.select {
            Some(SelectClause::Star) => {
                let concept = sources[0].1.concept;
                self.schema
                    .concept(concept)
                    .dims
                    .iter()
                    .map(|d| d.name.clone())
                    .collect()
            }
            Some(SelectClause::Exprs(items)) => items
                .iter()
                .map(|item| match &item.alias {
                    Some(a) => a.name.clone(),
                    None => print_expr(&item.expr),
                })
                .collect(),
            None => {
                let first_return = q.body.iter().find_map(|s| match s {
                    Stmt::Return(exprs) | Stmt::If { then_return: exprs, .. } => Some(exprs),
                    _ => None,
                });
                match first_return {
                    Some(exprs) => exprs.iter().map(print_expr).collect(),
                    None => sources
                        .iter()
                        .map(|(var, coll)| {
                            var.clone()
                                .unwrap_or_else(|| self.schema.concept(coll.concept).name.clone())
                        })
                        .collect(),
                }
            }
        };
        // Column names must be unique.
        let mut columns = Vec::new();
        for name in raw {
            let mut unique = name.clone();
            let mut n = 2;
            while columns.contains(&unique) {
                unique = format!("{name}_{n}");
                n += 1;
            }
            columns.push(unique);
        }
        Ok(columns)
    }

    /// Entity items stay items; value-concept items read as their literal.
    fn item_value(&self, item: ItemRef) -> Value {
        match self.schema.value_of(item) {
            Some(Literal::Int(v)) => Value::Int(*v),
            Some(Literal::Dec(d)) => Value::Dec(*d),
            Some(Literal::Str(s)) => Value::Str(s.clone()),
            None => Value::Item(item),
        }
    }

    fn to_collection(&self, value: Value) -> Result<Collection, CoqlError> {
        match value {
            Value::Coll(c) => Ok(c),
            Value::Item(i) => Ok(Collection::new(i.concept, vec![i])),
            other => Err(CoqlError::TypeMismatch(format!(
                "expected a collection of items, got {}",
                other.type_name()
            ))),
        }
    }

    fn eval_expr(&self, e: &Expr, env: &mut Env) -> Result<Value, CoqlError> {
        match e {
            Expr::Int(v) => Ok(Value::Int(*v)),
            Expr::Dec(text) => text
                .parse::<Decimal>()
                .map(Value::Dec)
                .map_err(|_| CoqlError::Runtime(format!("bad decimal literal `{text}`"))),
            Expr::Str(s) => Ok(Value::Str(s.clone())),
            Expr::This => env
                .lookup("this")
                .cloned()
                .ok_or_else(|| CoqlError::UnboundVariable("this".to_string())),
            Expr::Name(name) => {
                if let Some(v) = env.lookup(&name.name) {
                    return Ok(v.clone());
                }
                if let Some(c) = self.schema.concept_by_name(&name.name) {
                    return Ok(Value::Coll(self.concept_collection(c)));
                }
                Err(CoqlError::UnboundVariable(name.name.clone()))
            }
            Expr::Filter { source, var, cond } => {
                let coll = self.to_collection(self.eval_expr(source, env)?)?;
                let mut members = Vec::new();
                for member in &coll.members {
                    let mark = env.mark();
                    if let Some(v) = var {
                        env.bind(&v.name, Value::Item(*member));
                    }
                    env.bind("this", Value::Item(*member));
                    let keep = truthy(&self.eval_expr(cond, env)?);
                    env.reset(mark);
                    if keep {
                        members.push(*member);
                    }
                }
                Ok(Value::Coll(Collection::new(coll.concept, members)))
            }
            Expr::MultiDeproject(chains) => {
                let mut result: Option<Collection> = None;
                for chain in chains {
                    let coll = self.to_collection(self.eval_expr(chain, env)?)?;
                    result = Some(match result {
                        None => coll,
                        Some(acc) => Collection::new(
                            acc.concept,
                            acc.members
                                .into_iter()
                                .filter(|m| coll.contains(*m))
                                .collect(),
                        ),
                    });
                }
                Ok(Value::Coll(result.ok_or_else(|| {
                    CoqlError::TypeMismatch("empty bracket group".to_string())
                })?))
            }
            Expr::Subquery(q) => {
                let table = self.eval_query_env(q, env)?;
                self.table_to_value(table)
            }
            Expr::Binary { op, lhs, rhs } => self.eval_binary(*op, lhs, rhs, env),
            Expr::Not(inner) => Ok(Value::Bool(!truthy(&self.eval_expr(inner, env)?))),
            Expr::Neg(inner) => match self.eval_expr(inner, env)? {
                Value::Int(v) => Ok(Value::Int(-v)),
                Value::Dec(d) => Ok(Value::Dec(-d)),
                Value::Null => Ok(Value::Null),
                other => Err(CoqlError::TypeMismatch(format!(
                    "cannot negate {}",
                    other.type_name()
                ))),
            },
            Expr::Aggregate { func, arg } => {
                let value = self.eval_expr(arg, env)?;
                self.aggregate(*func, value)
            }
            Expr::Call { recv, name, args } => {
                let item = match self.eval_expr(recv, env)? {
                    Value::Item(i) => i,
                    Value::Null => return Ok(Value::Null),
                    other => {
                        return Err(CoqlError::TypeMismatch(format!(
                            "property call on {}",
                            other.type_name()
                        )))
                    }
                };
                let prop = self
                    .registry
                    .lookup(item.concept, &name.name, args.len())
                    .ok_or_else(|| CoqlError::UnknownProperty {
                        concept: self.schema.concept(item.concept).name.clone(),
                        name: name.name.clone(),
                    })?;
                let mut arg_values = Vec::new();
                for (arg, (_, pconcept)) in args.iter().zip(&prop.params) {
                    let v = self.eval_expr(arg, env)?;
                    arg_values.push(self.coerce_param(v, *pconcept));
                }
                let mark = env.mark();
                env.bind("this", Value::Item(item));
                for ((pname, _), v) in prop.params.iter().zip(arg_values) {
                    env.bind(pname, v);
                }
                let mut result = Value::Null;
                for stmt in &prop.body {
                    match stmt {
                        Stmt::Decl { name, value, .. } => {
                            let v = self.eval_expr(value, env)?;
                            env.bind(&name.name, v);
                        }
                        Stmt::Return(exprs) => {
                            result = self.eval_expr(&exprs[0], env)?;
                            break;
                        }
                        Stmt::If { cond, then_return } => {
                            if truthy(&self.eval_expr(cond, env)?) {
                                result = self.eval_expr(&then_return[0], env)?;
                                break;
                            }
                        }
                    }
                }
                env.reset(mark);
                Ok(result)
            }
            Expr::Step { recv, step } => {
                let base = self.eval_expr(recv, env)?;
                self.eval_step(base, step, env)
            }
        }
    }

    /// Scalar arguments to properties with value-concept parameters are
    /// looked up as items of that concept; a missing item becomes null.
    fn coerce_param(&self, value: Value, concept: ConceptId) -> Value {
        if let ConceptKind::Value(kind) = self.schema.concept(concept).kind {
            let literal = match (&value, kind) {
                (Value::Int(v), ValueKind::Int) => Some(Literal::Int(*v)),
                (Value::Dec(d), ValueKind::Decimal) => Some(Literal::Dec(*d)),
                (Value::Str(s), ValueKind::Str | ValueKind::Date) => {
                    Some(Literal::Str(s.clone()))
                }
                _ => None,
            };
            if let Some(lit) = literal {
                return match self.schema.item_by_key(concept, &lit.canonical()) {
                    Some(item) => Value::Item(item),
                    None => Value::Null,
                };
            }
        }
        value
    }

    fn eval_step(&self, base: Value, step: &Step, env: &mut Env) -> Result<Value, CoqlError> {
        // Lists of items (scalar-shaped subquery results) navigate like
        // collections; an empty list stays empty through any step.
        let base = match base {
            Value::List(vs) => {
                if vs.is_empty() {
                    return Ok(Value::List(Vec::new()));
                }
                let mut items = Vec::with_capacity(vs.len());
                let mut all_items = true;
                for v in &vs {
                    match v {
                        Value::Item(i) => items.push(*i),
                        _ => {
                            all_items = false;
                            break;
                        }
                    }
                }
                if all_items && items.iter().all(|i| i.concept == items[0].concept) {
                    Value::Coll(Collection::new(items[0].concept, items))
                } else {
                    Value::List(vs)
                }
            }
            other => other,
        };
        match step {
            Step::Project(dim) => match base {
                Value::Item(item) => self.slot_value(item, &dim.name),
                Value::Coll(coll) => {
                    let path = crate::oset::DimPath(vec![dim.name.clone()]);
                    let out = navigate::project(self.schema, &coll, &path)
                        .map_err(|e| CoqlError::Nav(e.to_string()))?;
                    Ok(Value::Coll(out))
                }
                Value::Null => Ok(Value::Null),
                other => Err(CoqlError::TypeMismatch(format!(
                    "projection `-> {}` on {}",
                    dim.name,
                    other.type_name()
                ))),
            },
            Step::Dot(dim) => match base {
                Value::Item(item) => self.slot_value(item, &dim.name),
                Value::Coll(coll) => {
                    let path = crate::oset::DimPath(vec![dim.name.clone()]);
                    let out = navigate::dot(self.schema, &coll, &path)
                        .map_err(|e| CoqlError::Nav(e.to_string()))?;
                    Ok(Value::Coll(out.collection))
                }
                Value::Null => Err(CoqlError::NullNavigation(dim.name.clone())),
                other => Err(CoqlError::TypeMismatch(format!(
                    "navigation `.{}` on {}",
                    dim.name,
                    other.type_name()
                ))),
            },
            Step::DotTuple(exprs) => {
                let members: Vec<ItemRef> = match base {
                    Value::Item(item) => vec![item],
                    Value::Coll(coll) => coll.members,
                    Value::Null => return Err(CoqlError::NullNavigation("<>".to_string())),
                    other => {
                        return Err(CoqlError::TypeMismatch(format!(
                            "tuple access on {}",
                            other.type_name()
                        )))
                    }
                };
                let mut out = Vec::new();
                for member in members {
                    let mark = env.mark();
                    env.bind("this", Value::Item(member));
                    let mut vals = Vec::new();
                    for e in exprs {
                        vals.push(self.eval_expr(e, env)?);
                    }
                    env.reset(mark);
                    let v = if vals.len() == 1 {
                        vals.into_iter().next().unwrap()
                    } else {
                        Value::List(vals)
                    };
                    // dot semantics: null computations are dropped
                    if v != Value::Null {
                        out.push(v);
                    }
                }
                Ok(Value::List(out))
            }
            Step::Deproject(items) => {
                let source = self.to_collection(base)?;
                self.eval_deproject(source, items, env)
            }
        }
    }

    fn eval_deproject(
        &self,
        source: Collection,
        items: &[DeprojItem],
        env: &mut Env,
    ) -> Result<Value, CoqlError> {
        let mut current = source;
        let mut pending: Vec<String> = Vec::new();
        let n = items.len();
        for (i, item) in items.iter().enumerate() {
            let last = i + 1 == n;
            match item {
                DeprojItem::Name(name) if !last => pending.push(name.name.clone()),
                DeprojItem::Name(name) => {
                    let target = if let Some(v) = env.lookup(&name.name) {
                        self.to_collection(v.clone())?
                    } else if let Some(c) = self.schema.concept_by_name(&name.name) {
                        self.concept_collection(c)
                    } else {
                        return Err(CoqlError::UnknownConcept(name.name.clone()));
                    };
                    current = self.deproject_segment(current, &mut pending, target)?;
                }
                DeprojItem::Target(expr) => {
                    let target = self.to_collection(self.eval_expr(expr, env)?)?;
                    current = self.deproject_segment(current, &mut pending, target)?;
                }
            }
        }
        Ok(Value::Coll(current))
    }

    /// Walk one segment of a de-projection chain; intermediate hops pass
    /// through the (constraint-filtered) concept owning that dimension.
    fn deproject_segment(
        &self,
        source: Collection,
        pending: &mut Vec<String>,
        target: Collection,
    ) -> Result<Collection, CoqlError> {
        let dims = std::mem::take(pending);
        let mut current = source;
        for (i, dim) in dims.iter().enumerate() {
            let last = i + 1 == dims.len();
            if last {
                current = navigate::deproject(self.schema, &current, dim, &target)
                    .map_err(|e| CoqlError::Nav(e.to_string()))?;
            } else {
                let hop = navigate::infer_hop(self.schema, dim, current.concept).map_err(|e| {
                    match e {
                        navigate::NavError::AmbiguousDeprojection(d, a, b) => {
                            CoqlError::AmbiguousDeprojection(format!(
                                "dimension `{d}` is owned by both `{a}` and `{b}`"
                            ))
                        }
                        other => CoqlError::Nav(other.to_string()),
                    }
                })?;
                let hop_coll = self.concept_collection(hop);
                current = navigate::deproject(self.schema, &current, dim, &hop_coll)
                    .map_err(|e| CoqlError::Nav(e.to_string()))?;
            }
        }
        Ok(current)
    }

    /// Slot access keeps the item identity; value-concept items read as
    /// literals only where a scalar is demanded (comparisons, arithmetic,
    /// aggregation, rendering), so de-projection from them still works.
    fn slot_value(&self, item: ItemRef, dim: &str) -> Result<Value, CoqlError> {
        match self.schema.get_slot(item, dim) {
            Ok(Some(r)) => Ok(Value::Item(r)),
            Ok(None) => Ok(Value::Null),
            Err(e) => Err(CoqlError::Model(e.to_string())),
        }
    }

    fn table_to_value(&self, table: ResultTable) -> Result<Value, CoqlError> {
        if let Some(backing) = table.backing {
            return Ok(Value::Coll(backing));
        }
        if table.columns.len() == 1 {
            let mut items: Vec<ItemRef> = Vec::new();
            let mut all_items = true;
            for row in &table.rows {
                match &row[0] {
                    Value::Item(i) => items.push(*i),
                    _ => {
                        all_items = false;
                        break;
                    }
                }
            }
            if all_items && !table.rows.is_empty() {
                let concept = items[0].concept;
                if items.iter().all(|i| i.concept == concept) {
                    return Ok(Value::Coll(Collection::new(concept, items)));
                }
            }
            return Ok(Value::List(
                table.rows.into_iter().map(|mut r| r.remove(0)).collect(),
            ));
        }
        Ok(Value::List(
            table.rows.into_iter().map(Value::List).collect(),
        ))
    }

    pub(crate) fn aggregate(&self, func: AggFunc, value: Value) -> Result<Value, CoqlError> {
        let scalars: Vec<Value> = match &value {
            Value::Coll(c) => c.members.iter().map(|m| self.item_value(*m)).collect(),
            Value::List(vs) => vs.iter().map(|v| self.scalarize(v.clone())).collect(),
            Value::Null => Vec::new(),
            other => {
                return Err(CoqlError::TypeMismatch(format!(
                    "{} over {}",
                    func.text(),
                    other.type_name()
                )))
            }
        };
        match func {
            AggFunc::Count | AggFunc::Size => Ok(Value::Int(scalars.len() as i64)),
            AggFunc::Sum => {
                let mut int_sum: i64 = 0;
                let mut dec_sum = Decimal::ZERO;
                let mut saw_dec = false;
                for v in &scalars {
                    match v {
                        Value::Int(n) => int_sum += n,
                        Value::Dec(d) => {
                            saw_dec = true;
                            dec_sum += d;
                        }
                        Value::Null => {}
                        other => {
                            return Err(CoqlError::TypeMismatch(format!(
                                "SUM over {}",
                                other.type_name()
                            )))
                        }
                    }
                }
                if saw_dec {
                    Ok(Value::Dec(dec_sum + Decimal::from(int_sum)))
                } else {
                    Ok(Value::Int(int_sum))
                }
            }
            AggFunc::Average => {
                if scalars.is_empty() {
                    return Err(CoqlError::EmptyAverage);
                }
                let mut sum = Decimal::ZERO;
                let mut count = 0i64;
                for v in &scalars {
                    match v {
                        Value::Int(n) => {
                            sum += Decimal::from(*n);
                            count += 1;
                        }
                        Value::Dec(d) => {
                            sum += d;
                            count += 1;
                        }
                        Value::Null => {}
                        other => {
                            return Err(CoqlError::TypeMismatch(format!(
                                "AVERAGE over {}",
                                other.type_name()
                            )))
                        }
                    }
                }
                if count == 0 {
                    return Err(CoqlError::EmptyAverage);
                }
                Ok(Value::Dec(sum / Decimal::from(count)))
            }
        }
    }

    fn eval_binary(&self, op: BinOp, lhs: &Expr, rhs: &Expr, env: &mut Env) -> Result<Value, CoqlError> {
        match op {
            BinOp::And => {
                if !truthy(&self.eval_expr(lhs, env)?) {
                    return Ok(Value::Bool(false));
                }
                Ok(Value::Bool(truthy(&self.eval_expr(rhs, env)?)))
            }
            BinOp::Or => {
                if truthy(&self.eval_expr(lhs, env)?) {
                    return Ok(Value::Bool(true));
                }
                Ok(Value::Bool(truthy(&self.eval_expr(rhs, env)?)))
            }
            _ => {
                let l = self.eval_expr(lhs, env)?;
                let r = self.eval_expr(rhs, env)?;
                match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => self.arith(op, l, r),
                    _ => self.compare(op, l, r),
                }
            }
        }
    }

    fn arith(&self, op: BinOp, l: Value, r: Value) -> Result<Value, CoqlError> {
        let l = self.scalarize(l);
        let r = self.scalarize(r);
        if l == Value::Null || r == Value::Null {
            return Ok(Value::Null);
        }
        let as_dec = |v: &Value| -> Option<Decimal> {
            match v {
                Value::Int(n) => Some(Decimal::from(*n)),
                Value::Dec(d) => Some(*d),
                _ => None,
            }
        };
        let (Some(a), Some(b)) = (as_dec(&l), as_dec(&r)) else {
            return Err(CoqlError::TypeMismatch(format!(
                "arithmetic on {} and {}",
                l.type_name(),
                r.type_name()
            )));
        };
        if matches!(op, BinOp::Div) && b.is_zero() {
            return Err(CoqlError::DivisionByZero);
        }
        let ints = matches!((&l, &r), (Value::Int(_), Value::Int(_)));
        let result = match op {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Div => a / b,
            _ => unreachable!(),
        };
        if ints && !matches!(op, BinOp::Div) {
            use rust_decimal::prelude::ToPrimitive;
            result
                .to_i64()
                .map(Value::Int)
                .ok_or_else(|| CoqlError::Runtime("integer overflow".to_string()))
        } else {
            Ok(Value::Dec(result))
        }
    }

    /// Items of value concepts read as their literal in scalar positions.
    fn scalarize(&self, v: Value) -> Value {
        match v {
            Value::Item(i) => self.item_value(i),
            other => other,
        }
    }

    fn compare(&self, op: BinOp, l: Value, r: Value) -> Result<Value, CoqlError> {
        // Reference equality for entity items; everything else compares
        // by scalarized value. Null never satisfies a comparison.
        if let (Value::Item(a), Value::Item(b)) = (&l, &r) {
            if self.schema.value_of(*a).is_none() || self.schema.value_of(*b).is_none() {
                return match op {
                    BinOp::Eq => Ok(Value::Bool(a == b)),
                    BinOp::Ne => Ok(Value::Bool(a != b)),
                    _ => Err(CoqlError::TypeMismatch(
                        "ordering comparison on entity items".to_string(),
                    )),
                };
            }
        }
        let l = self.scalarize(l);
        let r = self.scalarize(r);
        if l == Value::Null || r == Value::Null {
            return Ok(Value::Bool(false));
        }
        let ord = match (&l, &r) {
            (Value::Int(a), Value::Int(b)) => a.partial_cmp(b),
            (Value::Dec(a), Value::Dec(b)) => a.partial_cmp(b),
            (Value::Int(a), Value::Dec(b)) => Decimal::from(*a).partial_cmp(b),
            (Value::Dec(a), Value::Int(b)) => a.partial_cmp(&Decimal::from(*b)),
            (Value::Str(a), Value::Str(b)) => a.partial_cmp(b),
            (Value::Bool(a), Value::Bool(b)) => a.partial_cmp(b),
            _ => None,
        };
        let Some(ord) = ord else {
            return Err(CoqlError::TypeMismatch(format!(
                "cannot compare {} with {}",
                l.type_name(),
                r.type_name()
            )));
        };
        let result = match op {
            BinOp::Eq => ord == std::cmp::Ordering::Equal,
            BinOp::Ne => ord != std::cmp::Ordering::Equal,
            BinOp::Lt => ord == std::cmp::Ordering::Less,
            BinOp::Le => ord != std::cmp::Ordering::Greater,
            BinOp::Gt => ord == std::cmp::Ordering::Greater,
            BinOp::Ge => ord != std::cmp::Ordering::Less,
            _ => unreachable!(),
        };
        Ok(Value::Bool(result))
    }
}

fn truthy(v: &Value) -> bool {
    matches!(v, Value::Bool(true))
}

/// Build a possibility from an elementary constraint expression. The
/// predicate may only use internal properties of the items: `this`, its
/// value, and rank-1 dimension accesses.
pub fn local_possibility(
    schema: &Schema,
    registry: &DerivedRegistry,
    concept: ConceptId,
    expr: &Expr,
) -> Result<Possibility, CoqlError> {
    fn ensure_local(e: &Expr) -> Result<(), CoqlError> {
        match e {
            Expr::Int(_) | Expr::Dec(_) | Expr::Str(_) | Expr::This | Expr::Name(_) => Ok(()),
            Expr::Binary { lhs, rhs, .. } => {
                ensure_local(lhs)?;
                ensure_local(rhs)
            }
            Expr::Not(inner) | Expr::Neg(inner) => ensure_local(inner),
            Expr::Step { recv, step } => {
                // only rank-1 dots on `this` (possibly via a bare name
                // rewritten later)
                match step {
                    Step::Dot(_) => match recv.as_ref() {
                        Expr::This => Ok(()),
                        _ => Err(CoqlError::NonLocalPredicate(
                            "navigation beyond the item's own slots".to_string(),
                        )),
                    },
                    _ => Err(CoqlError::NonLocalPredicate(
                        "projection or de-projection in an elementary constraint".to_string(),
                    )),
                }
            }
            _ => Err(CoqlError::NonLocalPredicate(
                "subqueries, filters and aggregates are not elementary".to_string(),
            )),
        }
    }

    let mut checker = Checker::new(schema, registry);
    checker.bind("this", concept);
    let mut checked = expr.clone();
    checker.check_expr(&mut checked)?;
    ensure_local(&checked)?;

    let interp = Interpreter::new(schema, registry);
    let mut possible = Vec::new();
    for item in schema.items(concept) {
        let mut env = Env::default();
        env.bind("this", Value::Item(item));
        if truthy(&interp.eval_expr(&checked, &mut env)?) {
            possible.push(item);
        }
    }
    Ok(Possibility::from_possible(concept, possible))
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => Ok(()),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(v) => write!(f, "{v}"),
            Value::Dec(d) => write!(f, "{d}"),
            Value::Str(s) => f.write_str(s),
            Value::Item(i) => write!(f, "item#{}", i.serial),
            Value::Coll(c) => write!(f, "collection[{}]", c.members.len()),
            Value::List(vs) => write!(f, "list[{}]", vs.len()),
        }
    }
}
