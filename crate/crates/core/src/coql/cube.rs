//! OLAP-style cube queries: group a fact concept over the Cartesian
//! product of level concepts chosen along dimension paths, then compute
//! aggregated measures per cell.

use crate::model::{ConceptId, ItemRef, Schema};
use crate::navigate::{self, Collection};
use crate::oset::DimPath;
use crate::propagate::ConstraintSet;

use super::ast::{AggFunc, Expr};
use super::check::Checker;
use super::eval::{DerivedRegistry, Interpreter, ResultTable, Value};
use super::CoqlError;

/// One grouping dimension: a path from the fact concept up to the level
/// concept whose items become the cube coordinates, optionally filtered.
#[derive(Debug, Clone)]
pub struct CubeDim {
    pub path: DimPath,
    pub level: ConceptId,
    pub filter: Option<Expr>,
}

/// An aggregated measure: the expression runs per group member with
/// `this` bound to the fact item.
#[derive(Debug, Clone)]
pub struct CubeMeasure {
    pub name: String,
    pub func: AggFunc,
    pub expr: Expr,
}

/// Evaluate a cube. Every cell of the level product yields one row;
/// empty groups report COUNT 0, SUM 0 and a null AVERAGE.
pub fn cube(
    schema: &Schema,
    registry: &DerivedRegistry,
    constraints: Option<&ConstraintSet>,
    fact: ConceptId,
    dims: &[CubeDim],
    fact_filter: Option<&Expr>,
    measures: &[CubeMeasure],
) -> Result<ResultTable, CoqlError> {
    let interp = Interpreter::new(schema, registry).with_constraints(constraints);

    // Validate paths and resolve the concepts they pass through.
    for dim in dims {
        let reached = schema
            .path_target(fact, &dim.path)
            .map_err(|e| CoqlError::PathMismatch(e.to_string()))?;
        if reached != dim.level {
            return Err(CoqlError::PathMismatch(format!(
                "path `{}` leads to `{}`, not `{}`",
                dim.path,
                schema.concept(reached).name,
                schema.concept(dim.level).name
            )));
        }
    }

    // Level coordinates, optionally filtered.
    let mut levels: Vec<Vec<ItemRef>> = Vec::new();
    for dim in dims {
        let items = filtered_items(&interp, schema, registry, dim.level, dim.filter.as_ref())?;
        levels.push(items);
    }
    let fact_pool = {
        let all = filtered_items(&interp, schema, registry, fact, fact_filter)?;
        Collection::new(fact, all)
    };

    // Check measures once with `this` bound to the fact concept.
    let mut checked_measures = Vec::new();
    for m in measures {
        let mut checker = Checker::new(schema, registry);
        checker.bind("this", fact);
        let mut expr = m.expr.clone();
        checker.check_expr(&mut expr)?;
        checked_measures.push((m.name.clone(), m.func, expr));
    }

    let mut columns: Vec<String> = dims
        .iter()
        .map(|d| schema.concept(d.level).name.clone())
        .collect();
    columns.extend(checked_measures.iter().map(|(n, _, _)| n.clone()));

    let mut rows = Vec::new();
    let mut cell = vec![0usize; dims.len()];
    if levels.iter().any(|l| l.is_empty()) && !dims.is_empty() {
        return Ok(ResultTable {
            columns,
            rows,
            backing: None,
        });
    }
    loop {
        let coords: Vec<ItemRef> = cell.iter().zip(&levels).map(|(&i, l)| l[i]).collect();
        // Multi-dimensional de-projection: facts whose walk along every
        // dimension path lands on this cell's coordinates.
        let mut group = fact_pool.clone();
        for (dim, &coord) in dims.iter().zip(&coords) {
            let members = deproject_along(schema, &interp, fact, dim, coord, &fact_pool)?;
            group.members.retain(|m| members.contains(m));
        }
        let mut row: Vec<Value> = coords.iter().map(|&c| Value::Item(c)).collect();
        for (_, func, expr) in &checked_measures {
            row.push(measure_value(&interp, &group, *func, expr)?);
        }
        rows.push(row);

        // odometer over the level product, last dimension fastest
        let mut i = dims.len();
        loop {
            if i == 0 {
                return Ok(ResultTable {
                    columns,
                    rows,
                    backing: None,
                });
            }
            i -= 1;
            cell[i] += 1;
            if cell[i] < levels[i].len() {
                break;
            }
            cell[i] = 0;
        }
        if dims.is_empty() {
            return Ok(ResultTable {
                columns,
                rows,
                backing: None,
            });
        }
    }
}

fn filtered_items(
    interp: &Interpreter,
    schema: &Schema,
    registry: &DerivedRegistry,
    concept: ConceptId,
    filter: Option<&Expr>,
) -> Result<Vec<ItemRef>, CoqlError> {
    let base: Vec<ItemRef> = {
        let coll = interp_concept(interp, concept);
        coll.members
    };
    let Some(filter) = filter else {
        return Ok(base);
    };
    let mut checker = Checker::new(schema, registry);
    checker.bind("this", concept);
    let mut cond = filter.clone();
    checker.check_expr(&mut cond)?;
    let mut out = Vec::new();
    for item in base {
        if interp.item_satisfies(&cond, item)? {
            out.push(item);
        }
    }
    Ok(out)
}

fn interp_concept(interp: &Interpreter, concept: ConceptId) -> Collection {
    interp.concept_collection(concept)
}

/// Walk one dimension path downward from a level coordinate to the fact
/// concept; intermediate hops are fixed by the path itself.
fn deproject_along(
    schema: &Schema,
    interp: &Interpreter,
    fact: ConceptId,
    dim: &CubeDim,
    coord: ItemRef,
    fact_pool: &Collection,
) -> Result<Vec<ItemRef>, CoqlError> {
    let mut current = Collection::new(dim.level, vec![coord]);
    let labels = &dim.path.0;
    for i in (0..labels.len()).rev() {
        let prefix = DimPath(labels[..i].to_vec());
        let sub_concept = schema
            .path_target(fact, &prefix)
            .map_err(|e| CoqlError::PathMismatch(e.to_string()))?;
        let target = if i == 0 {
            fact_pool.clone()
        } else {
            interp_concept(interp, sub_concept)
        };
        current = navigate::deproject(schema, &current, &labels[i], &target)
            .map_err(|e| CoqlError::Nav(e.to_string()))?;
    }
    Ok(current.members)
}

fn measure_value(
    interp: &Interpreter,
    group: &Collection,
    func: AggFunc,
    expr: &Expr,
) -> Result<Value, CoqlError> {
    let mut values = Vec::new();
    for &member in &group.members {
        let v = interp.eval_with_this(expr, member)?;
        if v != Value::Null {
            values.push(v);
        }
    }
    if values.is_empty() {
        return Ok(match func {
            AggFunc::Count | AggFunc::Size => Value::Int(0),
            AggFunc::Sum => Value::Int(0),
            AggFunc::Average => Value::Null,
        });
    }
    interp.aggregate(func, Value::List(values))
}
