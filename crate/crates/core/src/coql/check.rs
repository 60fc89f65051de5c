//! Static checking: resolves names against the schema and the derived
//! property registry, rewrites implicit references (bare dimensions
//! become `this` steps, collection-vs-number comparisons gain COUNT),
//! and reports unknown concepts, dimensions, variables and type clashes
//! before evaluation starts.

use crate::model::{ConceptId, ConceptKind, Schema};
use crate::navigate;
use crate::value::ValueKind;

use super::ast::*;
use super::eval::DerivedRegistry;
use super::CoqlError;

/// Loose value type used during checking; `Unknown` silences follow-on
/// errors once a subexpression could not be typed precisely.
/// `Value(c, k)` is an item of a value concept: it compares and computes
/// as its literal kind but still navigates as an item of `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ty {
    Unknown,
    Bool,
    Int,
    Dec,
    Str,
    Item(ConceptId),
    Value(ConceptId, ValueKind),
    Coll(ConceptId),
    ScalarColl,
}

impl Ty {
    fn is_collection(self) -> bool {
        matches!(self, Ty::Coll(_) | Ty::ScalarColl | Ty::Unknown)
    }

    fn is_numeric(self) -> bool {
        matches!(self, Ty::Int | Ty::Dec | Ty::Unknown) || matches!(self.scalar(), Ty::Int | Ty::Dec)
    }

    fn is_bool(self) -> bool {
        matches!(self, Ty::Bool | Ty::Unknown)
    }

    /// The literal kind a value-concept item reads as in scalar positions.
    fn scalar(self) -> Ty {
        match self {
            Ty::Value(_, ValueKind::Int) => Ty::Int,
            Ty::Value(_, ValueKind::Decimal) => Ty::Dec,
            Ty::Value(_, ValueKind::Str | ValueKind::Date) => Ty::Str,
            other => other,
        }
    }
}

pub struct Checker<'a> {
    schema: &'a Schema,
    registry: &'a DerivedRegistry,
    scopes: Vec<(String, Ty)>,
}

/// Check and desugar a query; the result is what `eval` expects.
pub fn check(query: &Query, schema: &Schema, registry: &DerivedRegistry) -> Result<Query, CoqlError> {
    let mut q = query.clone();
    let mut checker = Checker {
        schema,
        registry,
        scopes: Vec::new(),
    };
    checker.check_query(&mut q)?;
    Ok(q)
}

/// Check a bare expression in the empty scope.
pub fn check_expr_standalone(
    expr: &Expr,
    schema: &Schema,
    registry: &DerivedRegistry,
) -> Result<Expr, CoqlError> {
    let mut e = expr.clone();
    let mut checker = Checker {
        schema,
        registry,
        scopes: Vec::new(),
    };
    checker.check_expr(&mut e)?;
    Ok(e)
}

impl<'a> Checker<'a> {
    pub(crate) fn new(schema: &'a Schema, registry: &'a DerivedRegistry) -> Self {
        Checker {
            schema,
            registry,
            scopes: Vec::new(),
        }
    }

    pub(crate) fn bind(&mut self, name: &str, concept: ConceptId) {
        let ty = self.value_ty(concept);
        self.scopes.push((name.to_string(), ty));
    }

    fn lookup(&self, name: &str) -> Option<Ty> {
        self.scopes
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| *t)
    }

    fn value_ty(&self, concept: ConceptId) -> Ty {
        match self.schema.concept(concept).kind {
            ConceptKind::Value(kind) => Ty::Value(concept, kind),
            ConceptKind::Entity => Ty::Item(concept),
        }
    }

    pub(crate) fn check_query(&mut self, q: &mut Query) -> Result<Ty, CoqlError> {
        let frame = self.scopes.len();
        let mut source_concepts = Vec::new();
        for source in &mut q.sources {
            let ty = self.check_coll(&mut source.expr)?;
            let concept = match ty {
                Ty::Coll(c) => Some(c),
                Ty::Unknown => None,
                _ => {
                    return Err(CoqlError::TypeMismatch(
                        "FROM sources must be collections of items".to_string(),
                    ))
                }
            };
            source_concepts.push(concept);
            if let Some(var) = &source.var {
                let ty = concept.map(|c| self.value_ty(c)).unwrap_or(Ty::Unknown);
                self.scopes.push((var.name.clone(), ty));
            }
        }
        // A single source also binds `this` so bare dimension names and
        // unqualified SELECTs resolve.
        if let [only] = source_concepts.as_slice() {
            if let Some(c) = only {
                let ty = self.value_ty(*c);
                self.scopes.push(("this".to_string(), ty));
            }
        }

        let returns: usize = q
            .body
            .iter()
            .filter(|s| matches!(s, Stmt::Return(_) | Stmt::If { .. }))
            .count();
        if returns > 0 && q.select.is_some() {
            return Err(CoqlError::BothReturnAndSelect);
        }

        let mut return_arity: Option<usize> = None;
        for stmt in &mut q.body {
            match stmt {
                Stmt::Decl { ty, name, value } => {
                    let vty = self.check_expr(value)?;
                    let declared = self.declared_ty(ty)?;
                    check_decl_compat(&declared, vty, &name.name)?;
                    self.scopes.push((name.name.clone(), declared.unwrap_or(vty)));
                }
                Stmt::Return(exprs) => {
                    for e in exprs.iter_mut() {
                        self.check_expr(e)?;
                    }
                    check_arity(&mut return_arity, exprs.len())?;
                }
                Stmt::If { cond, then_return } => {
                    let cty = self.check_expr(cond)?;
                    if !cty.is_bool() {
                        return Err(CoqlError::TypeMismatch(
                            "IF condition must be boolean".to_string(),
                        ));
                    }
                    for e in then_return.iter_mut() {
                        self.check_expr(e)?;
                    }
                    check_arity(&mut return_arity, then_return.len())?;
                }
            }
        }

        if let Some(cond) = &mut q.where_clause {
            let ty = self.check_expr(cond)?;
            if !ty.is_bool() {
                return Err(CoqlError::TypeMismatch(
                    "WHERE condition must be boolean".to_string(),
                ));
            }
        }

        let result_ty = match &mut q.select {
            Some(SelectClause::Star) => {
                if q.sources.len() != 1 {
                    return Err(CoqlError::StarNeedsSingleSource);
                }
                source_concepts[0].map(Ty::Coll).unwrap_or(Ty::Unknown)
            }
            Some(SelectClause::Exprs(items)) => {
                let mut tys = Vec::new();
                for item in items.iter_mut() {
                    tys.push(self.check_expr(&mut item.expr)?);
                }
                match tys.as_slice() {
                    [Ty::Item(c)] => Ty::Coll(*c),
                    [one] if !one.is_collection() => Ty::ScalarColl,
                    _ => Ty::Unknown,
                }
            }
            None => {
                if returns > 0 {
                    Ty::Unknown
                } else if q.sources.len() == 1 {
                    source_concepts[0].map(Ty::Coll).unwrap_or(Ty::Unknown)
                } else {
                    Ty::Unknown
                }
            }
        };

        self.scopes.truncate(frame);
        Ok(result_ty)
    }

    fn declared_ty(&self, ty: &DeclType) -> Result<Option<Ty>, CoqlError> {
        Ok(match ty {
            DeclType::Collection(None) => None,
            DeclType::Collection(Some(c)) => {
                let cid = self
                    .schema
                    .concept_by_name(&c.name)
                    .ok_or_else(|| CoqlError::UnknownConcept(c.name.clone()))?;
                Some(Ty::Coll(cid))
            }
            DeclType::Item => None,
            DeclType::Concept(c) => {
                let cid = self
                    .schema
                    .concept_by_name(&c.name)
                    .ok_or_else(|| CoqlError::UnknownConcept(c.name.clone()))?;
                Some(self.value_ty(cid))
            }
            DeclType::Double => Some(Ty::Dec),
            DeclType::Integer => Some(Ty::Int),
        })
    }

    /// Check an expression in collection position; bare names resolve as
    /// concepts and unknown ones report UnknownConcept.
    fn check_coll(&mut self, e: &mut Expr) -> Result<Ty, CoqlError> {
        if let Expr::Name(name) = e {
            if self.lookup(&name.name).is_none() && self.schema.concept_by_name(&name.name).is_none()
            {
                return Err(CoqlError::UnknownConcept(name.name.clone()));
            }
        }
        let ty = self.check_expr(e)?;
        Ok(match ty {
            Ty::Item(c) | Ty::Value(c, _) => Ty::Coll(c),
            other => other,
        })
    }

    pub(crate) fn check_expr(&mut self, e: &mut Expr) -> Result<Ty, CoqlError> {
        match e {
            Expr::Int(_) => Ok(Ty::Int),
            Expr::Dec(_) => Ok(Ty::Dec),
            Expr::Str(_) => Ok(Ty::Str),
            Expr::This => self
                .lookup("this")
                .ok_or_else(|| CoqlError::UnboundVariable("this".to_string())),
            Expr::Name(name) => {
                if let Some(ty) = self.lookup(&name.name) {
                    return Ok(ty);
                }
                // A bare dimension of the implicit subject.
                if let Some(Ty::Item(c)) = self.lookup("this") {
                    if let Some(idx) = self.schema.concept(c).dim_index(&name.name) {
                        let domain = self.schema.concept(c).dims[idx].domain;
                        *e = Expr::Step {
                            recv: Box::new(Expr::This),
                            step: Step::Dot(name.clone()),
                        };
                        return Ok(self.value_ty(domain));
                    }
                }
                if let Some(c) = self.schema.concept_by_name(&name.name) {
                    return Ok(Ty::Coll(c));
                }
                Err(CoqlError::UnboundVariable(name.name.clone()))
            }
            Expr::Filter { source, var, cond } => {
                let sty = self.check_coll(source)?;
                let concept = match sty {
                    Ty::Coll(c) => Some(c),
                    Ty::Unknown => None,
                    _ => {
                        return Err(CoqlError::TypeMismatch(
                            "filter source must be a collection of items".to_string(),
                        ))
                    }
                };
                let frame = self.scopes.len();
                let item_ty = concept.map(|c| self.value_ty(c)).unwrap_or(Ty::Unknown);
                if let Some(v) = var {
                    self.scopes.push((v.name.clone(), item_ty));
                }
                self.scopes.push(("this".to_string(), item_ty));
                let cty = self.check_expr(cond)?;
                self.scopes.truncate(frame);
                if !cty.is_bool() {
                    return Err(CoqlError::TypeMismatch(
                        "filter condition must be boolean".to_string(),
                    ));
                }
                Ok(concept.map(Ty::Coll).unwrap_or(Ty::Unknown))
            }
            Expr::MultiDeproject(chains) => {
                let mut fact: Option<ConceptId> = None;
                for chain in chains.iter_mut() {
                    if !matches!(
                        chain,
                        Expr::Step {
                            step: Step::Deproject(_),
                            ..
                        }
                    ) {
                        return Err(CoqlError::TypeMismatch(
                            "bracketed groups must be de-projection chains".to_string(),
                        ));
                    }
                    match self.check_expr(chain)? {
                        Ty::Coll(c) => {
                            if let Some(f) = fact {
                                if f != c {
                                    return Err(CoqlError::TypeMismatch(
                                        "de-projection chains must end in one fact concept"
                                            .to_string(),
                                    ));
                                }
                            }
                            fact = Some(c);
                        }
                        Ty::Unknown => {}
                        _ => {
                            return Err(CoqlError::TypeMismatch(
                                "de-projection chain must produce a collection".to_string(),
                            ))
                        }
                    }
                }
                Ok(fact.map(Ty::Coll).unwrap_or(Ty::Unknown))
            }
            Expr::Subquery(q) => self.check_query(q),
            Expr::Binary { op, lhs, rhs } => {
                let lty = self.check_expr(lhs)?;
                let rty = self.check_expr(rhs)?;
                match op {
                    BinOp::And | BinOp::Or => {
                        if !lty.is_bool() || !rty.is_bool() {
                            return Err(CoqlError::TypeMismatch(format!(
                                "{} expects boolean operands",
                                op.text()
                            )));
                        }
                        Ok(Ty::Bool)
                    }
                    BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => {
                        let lnum = self.numeric_operand(lty);
                        let rnum = self.numeric_operand(rty);
                        if !lnum || !rnum {
                            return Err(CoqlError::TypeMismatch(format!(
                                "{} expects numeric operands",
                                op.text()
                            )));
                        }
                        if lty.scalar() == Ty::Int && rty.scalar() == Ty::Int && *op != BinOp::Div
                        {
                            Ok(Ty::Int)
                        } else {
                            Ok(Ty::Dec)
                        }
                    }
                    _ => {
                        // The count shortcut: a collection compared with a
                        // number stands for COUNT(collection).
                        let mut lty = lty;
                        let mut rty = rty;
                        if matches!(lty, Ty::Coll(_) | Ty::ScalarColl) && rty.is_numeric() {
                            wrap_count(lhs);
                            lty = Ty::Int;
                        }
                        if matches!(rty, Ty::Coll(_) | Ty::ScalarColl) && lty.is_numeric() {
                            wrap_count(rhs);
                            rty = Ty::Int;
                        }
                        if !comparable(lty, rty) {
                            return Err(CoqlError::TypeMismatch(format!(
                                "cannot compare {lty:?} with {rty:?}"
                            )));
                        }
                        Ok(Ty::Bool)
                    }
                }
            }
            Expr::Not(inner) => {
                let ty = self.check_expr(inner)?;
                if !ty.is_bool() {
                    return Err(CoqlError::TypeMismatch("NOT expects a boolean".to_string()));
                }
                Ok(Ty::Bool)
            }
            Expr::Neg(inner) => {
                let ty = self.check_expr(inner)?;
                if !ty.is_numeric() {
                    return Err(CoqlError::TypeMismatch("negation expects a number".to_string()));
                }
                Ok(ty)
            }
            Expr::Aggregate { func, arg } => {
                let ty = self.check_expr(arg)?;
                if !ty.is_collection() {
                    return Err(CoqlError::TypeMismatch(format!(
                        "{} expects a collection argument",
                        func.text()
                    )));
                }
                Ok(match func {
                    AggFunc::Count | AggFunc::Size => Ty::Int,
                    AggFunc::Sum | AggFunc::Average => Ty::Unknown,
                })
            }
            Expr::Call { recv, name, args } => {
                let rty = self.check_expr(recv)?;
                let owner = match rty {
                    Ty::Item(c) => c,
                    Ty::Unknown => {
                        for a in args.iter_mut() {
                            self.check_expr(a)?;
                        }
                        return Ok(Ty::Unknown);
                    }
                    _ => {
                        return Err(CoqlError::TypeMismatch(
                            "property call on a non-item".to_string(),
                        ))
                    }
                };
                let prop = match self.registry.lookup(owner, &name.name, args.len()) {
                    Some(p) => p,
                    None => {
                        if let Some(other) = self.registry.lookup_any(owner, &name.name) {
                            return Err(CoqlError::ParamMismatch {
                                name: name.name.clone(),
                                expected: other.params.len(),
                                got: args.len(),
                            });
                        }
                        return Err(CoqlError::UnknownProperty {
                            concept: self.schema.concept(owner).name.clone(),
                            name: name.name.clone(),
                        });
                    }
                };
                let params = prop.params.clone();
                for (arg, (_, pconcept)) in args.iter_mut().zip(params.iter()) {
                    let aty = self.check_expr(arg)?;
                    let want = self.value_ty(*pconcept);
                    if aty != want && !comparable(aty, want) {
                        return Err(CoqlError::TypeMismatch(format!(
                            "argument to `{}` has type {aty:?}, expected {want:?}",
                            name.name
                        )));
                    }
                }
                Ok(Ty::Unknown)
            }
            Expr::Step { recv, step } => {
                let rty = self.check_expr(recv)?;
                self.check_step(rty, step)
            }
        }
    }

    fn numeric_operand(&self, ty: Ty) -> bool {
        ty.is_numeric()
    }

    fn check_step(&mut self, rty: Ty, step: &mut Step) -> Result<Ty, CoqlError> {
        match step {
            Step::Project(dim) | Step::Dot(dim) => {
                let (concept, was_coll) = match rty {
                    Ty::Item(c) | Ty::Value(c, _) => (c, false),
                    Ty::Coll(c) => (c, true),
                    Ty::Unknown => return Ok(Ty::Unknown),
                    _ => {
                        return Err(CoqlError::TypeMismatch(format!(
                            "navigation `{dim}` on a non-item value"
                        )))
                    }
                };
                let cdef = self.schema.concept(concept);
                let idx = cdef
                    .dim_index(&dim.name)
                    .ok_or_else(|| CoqlError::UnknownDimension {
                        concept: cdef.name.clone(),
                        dim: dim.name.clone(),
                    })?;
                let domain = cdef.dims[idx].domain;
                Ok(if was_coll {
                    Ty::Coll(domain)
                } else {
                    self.value_ty(domain)
                })
            }
            Step::DotTuple(exprs) => {
                let concept = match rty {
                    Ty::Item(c) | Ty::Value(c, _) | Ty::Coll(c) => Some(c),
                    Ty::Unknown => None,
                    _ => {
                        return Err(CoqlError::TypeMismatch(
                            "tuple access on a non-item value".to_string(),
                        ))
                    }
                };
                let frame = self.scopes.len();
                let item_ty = concept.map(|c| self.value_ty(c)).unwrap_or(Ty::Unknown);
                self.scopes.push(("this".to_string(), item_ty));
                for e in exprs.iter_mut() {
                    self.check_expr(e)?;
                }
                self.scopes.truncate(frame);
                Ok(Ty::ScalarColl)
            }
            Step::Deproject(items) => {
                let mut current = match rty {
                    Ty::Item(c) | Ty::Value(c, _) | Ty::Coll(c) => Some(c),
                    Ty::Unknown => None,
                    _ => {
                        return Err(CoqlError::TypeMismatch(
                            "de-projection of a non-item value".to_string(),
                        ))
                    }
                };
                let n = items.len();
                if n == 0 {
                    return Err(CoqlError::TypeMismatch(
                        "empty de-projection chain".to_string(),
                    ));
                }
                let mut pending: Vec<String> = Vec::new();
                for (i, item) in items.iter_mut().enumerate() {
                    let last = i + 1 == n;
                    match item {
                        DeprojItem::Name(name) if !last => pending.push(name.name.clone()),
                        DeprojItem::Name(name) => {
                            // final target: a collection variable or concept
                            let tty = match self.lookup(&name.name) {
                                Some(t) => t,
                                None => match self.schema.concept_by_name(&name.name) {
                                    Some(c) => Ty::Coll(c),
                                    None => {
                                        return Err(CoqlError::UnknownConcept(name.name.clone()))
                                    }
                                },
                            };
                            current = self.close_segment(current, &mut pending, tty)?;
                        }
                        DeprojItem::Target(expr) => {
                            let tty = self.check_coll(expr)?;
                            current = self.close_segment(current, &mut pending, tty)?;
                        }
                    }
                }
                if !pending.is_empty() {
                    return Err(CoqlError::TypeMismatch(
                        "de-projection chain must end with a target collection".to_string(),
                    ));
                }
                Ok(current.map(Ty::Coll).unwrap_or(Ty::Unknown))
            }
        }
    }

    /// Validate one `<- d1 <- ... <- dk <- target` segment: intermediate
    /// dimensions hop through uniquely inferred concepts, the final
    /// dimension belongs to the target.
    fn close_segment(
        &mut self,
        current: Option<ConceptId>,
        pending: &mut Vec<String>,
        target_ty: Ty,
    ) -> Result<Option<ConceptId>, CoqlError> {
        let dims = std::mem::take(pending);
        if dims.is_empty() {
            return Err(CoqlError::TypeMismatch(
                "de-projection target without a dimension".to_string(),
            ));
        }
        let target = match target_ty {
            Ty::Coll(c) => c,
            Ty::Unknown => return Ok(None),
            _ => {
                return Err(CoqlError::TypeMismatch(
                    "de-projection target must be a collection".to_string(),
                ))
            }
        };
        let Some(mut cur) = current else {
            return Ok(Some(target));
        };
        for (i, dim) in dims.iter().enumerate() {
            let last = i + 1 == dims.len();
            if last {
                let tdef = self.schema.concept(target);
                let idx = tdef
                    .dim_index(dim)
                    .ok_or_else(|| CoqlError::UnknownDimension {
                        concept: tdef.name.clone(),
                        dim: dim.clone(),
                    })?;
                if tdef.dims[idx].domain != cur {
                    return Err(CoqlError::TypeMismatch(format!(
                        "dimension `{dim}` of `{}` does not reference `{}`",
                        tdef.name,
                        self.schema.concept(cur).name
                    )));
                }
                cur = target;
            } else {
                cur = navigate::infer_hop(self.schema, dim, cur).map_err(|err| match err {
                    navigate::NavError::AmbiguousDeprojection(d, a, b) => {
                        CoqlError::AmbiguousDeprojection(format!(
                            "dimension `{d}` is owned by both `{a}` and `{b}`"
                        ))
                    }
                    other => CoqlError::Nav(other.to_string()),
                })?;
            }
        }
        Ok(Some(cur))
    }
}

fn wrap_count(expr: &mut Expr) {
    let inner = std::mem::replace(expr, Expr::This);
    *expr = Expr::Aggregate {
        func: AggFunc::Count,
        arg: Box::new(inner),
    };
}

fn comparable(lty: Ty, rty: Ty) -> bool {
    use Ty::*;
    match (lty, rty) {
        (Item(a), Item(b)) => a == b,
        (Item(_), _) | (_, Item(_)) => false,
        _ => match (lty.scalar(), rty.scalar()) {
            (Unknown, _) | (_, Unknown) => true,
            (Int | Dec, Int | Dec) => true,
            (Str, Str) => true,
            (Bool, Bool) => true,
            _ => false,
        },
    }
}

fn check_decl_compat(declared: &Option<Ty>, actual: Ty, name: &str) -> Result<(), CoqlError> {
    let Some(declared) = declared else {
        return Ok(());
    };
    let ok = match (declared, actual) {
        (_, Ty::Unknown) => true,
        (Ty::Coll(a), Ty::Coll(b)) => *a == b,
        (Ty::Coll(_), Ty::ScalarColl) => false,
        (Ty::Dec, other) => matches!(other.scalar(), Ty::Int | Ty::Dec),
        (Ty::Int, other) => other.scalar() == Ty::Int,
        (a, b) => *a == b || *a == b.scalar(),
    };
    if ok {
        Ok(())
    } else {
        Err(CoqlError::TypeMismatch(format!(
            "variable `{name}` declared {declared:?} but initialized with {actual:?}"
        )))
    }
}

fn check_arity(seen: &mut Option<usize>, arity: usize) -> Result<(), CoqlError> {
    match seen {
        None => {
            *seen = Some(arity);
            Ok(())
        }
        Some(prev) if *prev == arity => Ok(()),
        Some(prev) => Err(CoqlError::TypeMismatch(format!(
            "RETURN arity mismatch: {prev} vs {arity}"
        ))),
    }
}
