//! Possibility distributions, constraint propagation and inference.
//!
//! Constraints carry possibilistic semantics: 0 marks an item prohibited,
//! 1 keeps it possible, and combining constraints only ever prohibits
//! more. Downward propagation prohibits an item when one of its
//! super-items is prohibited (a null slot created by prohibition
//! prohibits the item); upward propagation marks possible exactly the
//! items reachable as slots of possible items. Inference chains the two:
//! de-project source constraints to the bottom concept, intersect,
//! project up to the target.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::model::{ConceptId, ItemRef, ModelError, Schema};
use crate::navigate::{self, Collection, NavError};
use crate::oset::DimPath;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PropagateError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Nav(#[from] NavError),
    #[error("path `{path}` does not lead from `{bottom}` to `{concept}`")]
    PathMismatch {
        path: String,
        bottom: String,
        concept: String,
    },
}

/// A total {0,1} map over the current items of one concept, stored as
/// the set of possible items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Possibility {
    pub concept: ConceptId,
    possible: BTreeSet<ItemRef>,
}

impl Possibility {
    pub fn all(schema: &Schema, concept: ConceptId) -> Self {
        Possibility {
            concept,
            possible: schema.items(concept).collect(),
        }
    }

    pub fn none(concept: ConceptId) -> Self {
        Possibility {
            concept,
            possible: BTreeSet::new(),
        }
    }

    pub fn from_possible(concept: ConceptId, items: impl IntoIterator<Item = ItemRef>) -> Self {
        Possibility {
            concept,
            possible: items.into_iter().collect(),
        }
    }

    /// Evaluate a predicate over every current item; the predicate may
    /// only use internal properties of the item (its slots and value).
    pub fn from_predicate(
        schema: &Schema,
        concept: ConceptId,
        pred: impl Fn(&Schema, ItemRef) -> bool,
    ) -> Self {
        Possibility {
            concept,
            possible: schema.items(concept).filter(|i| pred(schema, *i)).collect(),
        }
    }

    pub fn is_possible(&self, item: ItemRef) -> bool {
        self.possible.contains(&item)
    }

    pub fn possible_items(&self) -> impl Iterator<Item = ItemRef> + '_ {
        self.possible.iter().copied()
    }

    pub fn possible_count(&self) -> usize {
        self.possible.len()
    }

    pub fn prohibit(&mut self, item: ItemRef) {
        self.possible.remove(&item);
    }

    /// Pointwise minimum; exclusions only ever grow.
    pub fn narrow(&mut self, other: &Possibility) {
        self.possible.retain(|i| other.possible.contains(i));
    }

    pub fn to_collection(&self) -> Collection {
        Collection::new(self.concept, self.possible.iter().copied().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Permanent part of the database, checked for consistency with data.
    Static,
    /// Imposed by one query; selects a subset of the current data.
    QueryScoped,
}

/// Per-concept possibility maps. Concepts absent from the set are fully
/// possible. Imposing twice combines pointwise, so once an item is
/// excluded it cannot be made possible again.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSet {
    pub kind: ConstraintKind,
    by_concept: BTreeMap<ConceptId, Possibility>,
}

impl ConstraintSet {
    pub fn new(kind: ConstraintKind) -> Self {
        ConstraintSet {
            kind,
            by_concept: BTreeMap::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.by_concept.is_empty()
    }

    pub fn concepts(&self) -> impl Iterator<Item = ConceptId> + '_ {
        self.by_concept.keys().copied()
    }

    pub fn possibility(&self, concept: ConceptId) -> Option<&Possibility> {
        self.by_concept.get(&concept)
    }

    pub fn is_possible(&self, item: ItemRef) -> bool {
        self.by_concept
            .get(&item.concept)
            .map(|p| p.is_possible(item))
            .unwrap_or(true)
    }

    /// Combine a new elementary constraint into the set (pointwise min).
    pub fn impose(&mut self, schema: &Schema, possibility: Possibility) {
        match self.by_concept.get_mut(&possibility.concept) {
            Some(existing) => existing.narrow(&possibility),
            None => {
                let mut base = Possibility::all(schema, possibility.concept);
                base.narrow(&possibility);
                self.by_concept.insert(possibility.concept, base);
            }
        }
    }

    fn set(&mut self, possibility: Possibility) {
        self.by_concept.insert(possibility.concept, possibility);
    }
}

/// Concepts ordered so that every dimension's domain precedes its source.
fn domains_first(schema: &Schema) -> Vec<ConceptId> {
    let n = schema.concept_count();
    let mut indeg = vec![0usize; n];
    let mut dependants: Vec<Vec<ConceptId>> = vec![Vec::new(); n];
    for cid in schema.concept_ids() {
        for d in &schema.concept(cid).dims {
            indeg[cid.0 as usize] += 1;
            dependants[d.domain.0 as usize].push(cid);
        }
    }
    let mut queue: Vec<ConceptId> = schema
        .concept_ids()
        .filter(|c| indeg[c.0 as usize] == 0)
        .collect();
    let mut order = Vec::new();
    while let Some(c) = queue.pop() {
        order.push(c);
        for &dep in &dependants[c.0 as usize] {
            indeg[dep.0 as usize] -= 1;
            if indeg[dep.0 as usize] == 0 {
                queue.push(dep);
            }
        }
    }
    order
}

/// Downward propagation to the least fixpoint: an item is prohibited if
/// at least one super-item along a selected dimension is prohibited.
/// `filter` optionally restricts, per concept, the dimensions along
/// which prohibition flows; the default is all dimensions.
pub fn propagate_down(
    schema: &Schema,
    cs: &ConstraintSet,
    filter: Option<&HashMap<ConceptId, Vec<String>>>,
) -> ConstraintSet {
    let mut result = cs.clone();
    for cid in domains_first(schema) {
        let cdef = schema.concept(cid);
        let selected: Vec<usize> = match filter.and_then(|f| f.get(&cid)) {
            Some(dims) => cdef
                .dims
                .iter()
                .enumerate()
                .filter(|(_, d)| dims.contains(&d.name))
                .map(|(i, _)| i)
                .collect(),
            None => (0..cdef.dims.len()).collect(),
        };
        if selected.is_empty() {
            continue;
        }
        let mut prohibited: Vec<ItemRef> = Vec::new();
        for item in schema.items(cid) {
            let slots = schema.slots_of(item);
            let dead = selected
                .iter()
                .any(|&i| slots[i].map(|s| !result.is_possible(s)).unwrap_or(false));
            if dead {
                prohibited.push(item);
            }
        }
        if prohibited.is_empty() {
            continue;
        }
        let mut poss = match result.possibility(cid) {
            Some(p) => p.clone(),
            None => Possibility::all(schema, cid),
        };
        for item in prohibited {
            poss.prohibit(item);
        }
        result.set(poss);
    }
    result
}

/// Upward propagation: starting from all-impossible on the ancestors of
/// the seeded concepts, an item becomes possible exactly when it is
/// reachable as a slot of a possible item. Seed concepts keep the
/// possibilities they were given.
pub fn propagate_up(schema: &Schema, cs: &ConstraintSet) -> ConstraintSet {
    let seeds: HashSet<ConceptId> = cs.concepts().collect();
    let mut ancestors: HashSet<ConceptId> = HashSet::new();
    for &seed in &seeds {
        for c in schema.reachable_up(seed) {
            if !seeds.contains(&c) {
                ancestors.insert(c);
            }
        }
    }
    let mut result = cs.clone();
    let mut marked: HashSet<ItemRef> = HashSet::new();
    let mut queue: Vec<ItemRef> = Vec::new();
    for &seed in &seeds {
        if let Some(p) = cs.possibility(seed) {
            queue.extend(p.possible_items());
        }
    }
    while let Some(item) = queue.pop() {
        for slot in schema.slots_of(item).iter().flatten() {
            if ancestors.contains(&slot.concept) && marked.insert(*slot) {
                queue.push(*slot);
            }
        }
    }
    for &c in &ancestors {
        let possible = marked.iter().copied().filter(|i| i.concept == c);
        result.set(Possibility::from_possible(c, possible));
    }
    result
}

/// A database state is consistent when no stored item is prohibited by
/// the static constraints (the stored data and the excluded region are
/// disjoint).
pub fn check_consistency(schema: &Schema, cs: &ConstraintSet) -> bool {
    cs.concepts().all(|c| {
        let p = cs.possibility(c).expect("listed concept");
        schema.items(c).all(|item| p.is_possible(item))
    })
}

/// One inference input: a possibility over a concept reached from bottom
/// along the given upward path.
#[derive(Debug, Clone)]
pub struct InferSource {
    pub concept: ConceptId,
    pub possibility: Possibility,
    /// Upward label path from the bottom concept to `concept`; the
    /// de-projection runs along its reverse.
    pub path: DimPath,
}

/// The inference output side: project the constrained bottom semantics
/// up along `path`.
#[derive(Debug, Clone)]
pub struct InferTarget {
    pub concept: ConceptId,
    pub path: DimPath,
}

fn check_path(
    schema: &Schema,
    bottom: ConceptId,
    path: &DimPath,
    concept: ConceptId,
) -> Result<(), PropagateError> {
    let reached = schema.path_target(bottom, path)?;
    if reached != concept {
        return Err(PropagateError::PathMismatch {
            path: path.to_string(),
            bottom: schema.concept(bottom).name.clone(),
            concept: schema.concept(concept).name.clone(),
        });
    }
    Ok(())
}

/// Two-step inference: de-project every source constraint down to the
/// bottom concept, intersect, then project the result up to the target.
/// With no sources the intersection is all of bottom, so the target
/// receives exactly its used values.
pub fn infer(
    schema: &Schema,
    sources: &[InferSource],
    bottom: ConceptId,
    target: &InferTarget,
) -> Result<Possibility, PropagateError> {
    check_path(schema, bottom, &target.path, target.concept)?;
    let bottom_coll = Collection::of_concept(schema, bottom);
    let mut constrained = bottom_coll.clone();
    for source in sources {
        check_path(schema, bottom, &source.path, source.concept)?;
        // De-project down the source path; each hop's concept is fixed
        // by the path prefix, so no name inference is involved.
        let mut down = source.possibility.to_collection();
        let labels = &source.path.0;
        for i in (0..labels.len()).rev() {
            let prefix = DimPath(labels[..i].to_vec());
            let sub_concept = schema.path_target(bottom, &prefix)?;
            let target_coll = if i == 0 {
                bottom_coll.clone()
            } else {
                Collection::of_concept(schema, sub_concept)
            };
            down = navigate::deproject(schema, &down, &labels[i], &target_coll)?;
        }
        constrained.members.retain(|m| down.contains(*m));
    }
    let projected = navigate::project(schema, &constrained, &target.path)?;
    Ok(Possibility::from_possible(
        target.concept,
        projected.members,
    ))
}
