//! Navigation algebra over the item order: projection, dot, de-projection
//! and chained access paths with turning points.
//!
//! Projection moves a collection up a dimension path with set semantics
//! (each super-item taken once); dot keeps one output per input member;
//! de-projection collects the sub-items referencing the collection.
//! Members whose walk hits null are invisible along that axis: projection
//! drops them, dot drops and counts them.

use thiserror::Error;

use crate::flatten::PrimitiveTable;
use crate::model::{ConceptId, ItemRef, ModelError, Schema};
use crate::oset::DimPath;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NavError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("dimension `{dim}` has domain `{expected}`, not `{actual}`")]
    DomainMismatch {
        dim: String,
        expected: String,
        actual: String,
    },
    #[error("no concept owns dimension `{0}` with domain `{1}`")]
    NoSuchHop(String, String),
    #[error("dimension `{0}` is ambiguous: owned by {1} and {2}")]
    AmbiguousDeprojection(String, String, String),
    #[error("multi-dimensional operation over an empty dimension list")]
    EmptyDimensionList,
}

/// An ordered collection of items of one concept; duplicates permitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collection {
    pub concept: ConceptId,
    pub members: Vec<ItemRef>,
}

impl Collection {
    pub fn new(concept: ConceptId, members: Vec<ItemRef>) -> Self {
        Collection { concept, members }
    }

    /// All current items of a concept, in store order.
    pub fn of_concept(schema: &Schema, concept: ConceptId) -> Self {
        Collection {
            concept,
            members: schema.items(concept).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, item: ItemRef) -> bool {
        self.members.contains(&item)
    }

    /// Distinct members in first-seen order.
    pub fn dedup(&self) -> Collection {
        let mut seen = Vec::new();
        for &m in &self.members {
            if !seen.contains(&m) {
                seen.push(m);
            }
        }
        Collection {
            concept: self.concept,
            members: seen,
        }
    }
}

/// Dot result: one output per input member plus the count of members
/// dropped because their walk hit null.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotResult {
    pub collection: Collection,
    pub dropped_nulls: usize,
}

/// One step of a logical access path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathStep {
    Project(DimPath),
    Dot(DimPath),
    Deproject { dims: Vec<String>, target: ConceptId },
}

/// Projection: distinct super-items reached by walking every member up
/// `path`; null walks drop the member; order is first-reached.
pub fn project(schema: &Schema, source: &Collection, path: &DimPath) -> Result<Collection, NavError> {
    let target = schema.path_target(source.concept, path)?;
    let mut members = Vec::new();
    for &m in &source.members {
        if let Some(s) = schema.walk(m, path)? {
            if !members.contains(&s) {
                members.push(s);
            }
        }
    }
    Ok(Collection {
        concept: target,
        members,
    })
}

/// Dot: one output per member, duplicates preserved; null walks are
/// dropped and counted separately.
pub fn dot(schema: &Schema, source: &Collection, path: &DimPath) -> Result<DotResult, NavError> {
    let target = schema.path_target(source.concept, path)?;
    let mut members = Vec::new();
    let mut dropped = 0usize;
    for &m in &source.members {
        match schema.walk(m, path)? {
            Some(s) => members.push(s),
            None => dropped += 1,
        }
    }
    Ok(DotResult {
        collection: Collection {
            concept: target,
            members,
        },
        dropped_nulls: dropped,
    })
}

/// One-hop de-projection: the distinct items of `target` whose `dim`
/// slot walks into the source collection.
pub fn deproject(
    schema: &Schema,
    source: &Collection,
    dim: &str,
    target: &Collection,
) -> Result<Collection, NavError> {
    let tdef = schema.concept(target.concept);
    let idx = tdef
        .dim_index(dim)
        .ok_or_else(|| ModelError::UnknownDimension {
            concept: tdef.name.clone(),
            dim: dim.to_string(),
        })?;
    let domain = tdef.dims[idx].domain;
    if domain != source.concept {
        return Err(NavError::DomainMismatch {
            dim: dim.to_string(),
            expected: schema.concept(domain).name.clone(),
            actual: schema.concept(source.concept).name.clone(),
        });
    }
    let source_set: std::collections::HashSet<ItemRef> = source.members.iter().copied().collect();
    let mut members = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for &cand in &target.members {
        if let Some(s) = schema.slots_of(cand)[idx] {
            if source_set.contains(&s) && seen.insert(cand) {
                members.push(cand);
            }
        }
    }
    Ok(Collection {
        concept: target.concept,
        members,
    })
}

/// Infer the unique concept owning dimension `dim` with the given domain.
pub fn infer_hop(schema: &Schema, dim: &str, domain: ConceptId) -> Result<ConceptId, NavError> {
    let mut found: Option<ConceptId> = None;
    for cid in schema.concept_ids() {
        let c = schema.concept(cid);
        if c.dims.iter().any(|d| d.name == dim && d.domain == domain) {
            if let Some(first) = found {
                return Err(NavError::AmbiguousDeprojection(
                    dim.to_string(),
                    schema.concept(first).name.clone(),
                    c.name.clone(),
                ));
            }
            found = Some(cid);
        }
    }
    found.ok_or_else(|| NavError::NoSuchHop(dim.to_string(), schema.concept(domain).name.clone()))
}

/// Chained de-projection `source <- d1 <- d2 <- ... <- target`: every
/// hop but the last lands in the inferred concept owning that dimension.
pub fn deproject_chain(
    schema: &Schema,
    source: &Collection,
    dims: &[String],
    target: &Collection,
) -> Result<Collection, NavError> {
    if dims.is_empty() {
        return Err(NavError::EmptyDimensionList);
    }
    let mut current = source.clone();
    for (i, dim) in dims.iter().enumerate() {
        if i + 1 == dims.len() {
            current = deproject(schema, &current, dim, target)?;
        } else {
            let hop = infer_hop(schema, dim, current.concept)?;
            let hop_coll = Collection::of_concept(schema, hop);
            current = deproject(schema, &current, dim, &hop_coll)?;
        }
    }
    Ok(current)
}

/// Left-to-right fold of an access path.
pub fn eval_path(schema: &Schema, source: &Collection, steps: &[PathStep]) -> Result<Collection, NavError> {
    let mut current = source.clone();
    for step in steps {
        current = match step {
            PathStep::Project(path) => project(schema, &current, path)?,
            PathStep::Dot(path) => dot(schema, &current, path)?.collection,
            PathStep::Deproject { dims, target } => {
                let target_coll = Collection::of_concept(schema, *target);
                deproject_chain(schema, &current, dims, &target_coll)?
            }
        };
    }
    Ok(current)
}

/// Multi-dimensional projection: the intersection of the projections
/// along each dimension. All dimensions must share one domain.
pub fn multi_project(schema: &Schema, source: &Collection, dims: &[String]) -> Result<Collection, NavError> {
    if dims.is_empty() {
        return Err(NavError::EmptyDimensionList);
    }
    let cdef = schema.concept(source.concept);
    let mut domain: Option<ConceptId> = None;
    for dim in dims {
        let idx = cdef
            .dim_index(dim)
            .ok_or_else(|| ModelError::UnknownDimension {
                concept: cdef.name.clone(),
                dim: dim.clone(),
            })?;
        let d = cdef.dims[idx].domain;
        if let Some(prev) = domain {
            if prev != d {
                return Err(NavError::DomainMismatch {
                    dim: dim.clone(),
                    expected: schema.concept(prev).name.clone(),
                    actual: schema.concept(d).name.clone(),
                });
            }
        }
        domain = Some(d);
    }
    let mut result: Option<Collection> = None;
    for dim in dims {
        let proj = project(schema, source, &DimPath(vec![dim.clone()]))?;
        result = Some(match result {
            None => proj,
            Some(acc) => Collection {
                concept: acc.concept,
                members: acc
                    .members
                    .into_iter()
                    .filter(|m| proj.contains(*m))
                    .collect(),
            },
        });
    }
    Ok(result.expect("dims nonempty"))
}

/// Multi-dimensional de-projection: sub-items of `target` referencing the
/// source along every listed dimension.
pub fn multi_deproject(
    schema: &Schema,
    source: &Collection,
    dims: &[String],
    target: &Collection,
) -> Result<Collection, NavError> {
    if dims.is_empty() {
        return Err(NavError::EmptyDimensionList);
    }
    let mut result: Option<Collection> = None;
    for dim in dims {
        let dep = deproject(schema, source, dim, target)?;
        result = Some(match result {
            None => dep,
            Some(acc) => Collection {
                concept: acc.concept,
                members: acc
                    .members
                    .into_iter()
                    .filter(|m| dep.contains(*m))
                    .collect(),
            },
        });
    }
    Ok(result.expect("dims nonempty"))
}

/// Full de-projection over all sub-dimensions of any rank: the bottom
/// items covered by some member, read off the flattened table.
pub fn full_deproject(table: &PrimitiveTable, source: &Collection) -> Result<Vec<ItemRef>, NavError> {
    let mut out: Vec<ItemRef> = Vec::new();
    for &e in &source.members {
        for idx in table.coverage(e) {
            let item = table.rows[idx].item;
            if !out.contains(&item) {
                out.push(item);
            }
        }
    }
    out.sort();
    Ok(out)
}
