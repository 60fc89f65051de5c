//! The two-level model: a schema of concepts ordered by labelled
//! dimensions, each concept physically containing data items.
//!
//! Concepts form a labelled ordered set (the schema graph); items of a
//! concept are labelled combinations of super-items constrained to come
//! from the declared domains (the syntactic constraint). Value concepts
//! are primitive: they carry no dimensions and identify items by a typed
//! literal, auto-created on first reference.

use std::collections::{HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::oset::{DimPath, Direction, OrderedSet, BOTTOM_SYMBOL, TOP_SYMBOL};
use crate::value::{Literal, ValueKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("duplicate concept `{0}`")]
    DuplicateConcept(String),
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("cycle detected at concept `{0}`")]
    CycleDetected(String),
    #[error("`{0}` is a reserved name")]
    ReservedName(String),
    #[error("duplicate dimension `{0}`")]
    DuplicateDimension(String),
    #[error("duplicate item `{id}` in concept `{concept}`")]
    DuplicateItem { concept: String, id: String },
    #[error("concept `{concept}` has no dimension `{dim}`")]
    UnknownDimension { concept: String, dim: String },
    #[error("slot `{dim}` of `{id}` must hold an item of `{expected}`, got one of `{actual}`")]
    DomainViolation {
        id: String,
        dim: String,
        expected: String,
        actual: String,
    },
    #[error("unknown referent `{key}` in concept `{concept}`")]
    UnknownReferent { concept: String, key: String },
    #[error("unknown item")]
    UnknownItem,
    #[error("literal does not match value type `{0}` of concept `{1}`")]
    ValueKindMismatch(ValueKind, String),
    #[error("concept `{0}` is not a value concept")]
    NotValueConcept(String),
    #[error("concept `{0}` is not an entity concept")]
    NotEntityConcept(String),
    #[error("item `{0}` is referenced by live items and cannot be deleted")]
    ItemInUse(String),
    #[error("no bottom concept is designated and none is uniquely minimal")]
    NoBottom,
}

/// Index of a concept within its schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConceptId(pub(crate) u32);

/// Stable reference to one item: concept plus a per-concept serial that
/// survives deletions of other items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemRef {
    pub concept: ConceptId,
    pub(crate) serial: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConceptKind {
    Entity,
    Value(ValueKind),
}

/// A labelled edge of the concept graph: dimension `name` of `source`
/// with the declared domain as its target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionDecl {
    pub name: String,
    pub domain: ConceptId,
}

#[derive(Debug, Clone)]
pub struct Concept {
    pub name: String,
    pub kind: ConceptKind,
    pub dims: Vec<DimensionDecl>,
}

impl Concept {
    pub fn dim_index(&self, name: &str) -> Option<usize> {
        self.dims.iter().position(|d| d.name == name)
    }

    pub fn is_value(&self) -> bool {
        matches!(self.kind, ConceptKind::Value(_))
    }
}

#[derive(Debug, Clone)]
struct ItemData {
    key: String,
    slots: Vec<Option<ItemRef>>,
    value: Option<Literal>,
}

#[derive(Debug, Clone, Default)]
struct ItemStore {
    by_serial: IndexMap<u32, ItemData>,
    by_key: HashMap<String, u32>,
    next: u32,
}

/// One violation found by [`Schema::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Cycle(String),
    DanglingDomain { concept: String, dim: String },
    DuplicateLabel { concept: String, dim: String },
    SyntacticBreach { concept: String, id: String, dim: String },
    UnknownReferent { concept: String, id: String, dim: String },
    MissingBottom,
    UnreachableConcept(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cycle(c) => write!(f, "CycleDetected: concept graph cycle at `{c}`"),
            Violation::DanglingDomain { concept, dim } => {
                write!(f, "DanglingDomain: `{concept}.{dim}` points to a missing concept")
            }
            Violation::DuplicateLabel { concept, dim } => {
                write!(f, "DuplicateLabel: `{concept}` declares `{dim}` twice")
            }
            Violation::SyntacticBreach { concept, id, dim } => {
                write!(f, "SyntacticBreach: `{concept}.{id}.{dim}` holds an item outside its domain")
            }
            Violation::UnknownReferent { concept, id, dim } => {
                write!(f, "UnknownReferent: `{concept}.{id}.{dim}` references a dead item")
            }
            Violation::MissingBottom => write!(f, "MissingBottom: no unique minimal concept"),
            Violation::UnreachableConcept(c) => {
                write!(f, "UnreachableConcept: `{c}` is not reachable upward from bottom")
            }
        }
    }
}

/// Validation outcome; `violations` break model guarantees, `warnings`
/// only limit which operations are available.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.warnings.is_empty()
    }
}

/// The two-level model: root of all concepts and their items.
#[derive(Debug, Clone, Default)]
pub struct Schema {
    pub name: String,
    concepts: Vec<Concept>,
    by_name: HashMap<String, ConceptId>,
    items: Vec<ItemStore>,
    designated_bottom: Option<ConceptId>,
}

impl Schema {
    pub fn new(name: &str) -> Self {
        Schema {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn concept_ids(&self) -> impl Iterator<Item = ConceptId> {
        (0..self.concepts.len() as u32).map(ConceptId)
    }

    pub fn concept(&self, id: ConceptId) -> &Concept {
        &self.concepts[id.0 as usize]
    }

    pub fn concept_by_name(&self, name: &str) -> Option<ConceptId> {
        self.by_name.get(name).copied()
    }

    pub fn resolve_concept(&self, name: &str) -> Result<ConceptId, ModelError> {
        self.concept_by_name(name)
            .ok_or_else(|| ModelError::UnknownConcept(name.to_string()))
    }

    pub fn concept_count(&self) -> usize {
        self.concepts.len()
    }

    pub fn define_concept(
        &mut self,
        name: &str,
        kind: ConceptKind,
        dims: &[(&str, &str)],
    ) -> Result<ConceptId, ModelError> {
        if name == TOP_SYMBOL || name == BOTTOM_SYMBOL {
            return Err(ModelError::ReservedName(name.to_string()));
        }
        if self.by_name.contains_key(name) {
            return Err(ModelError::DuplicateConcept(name.to_string()));
        }
        if matches!(kind, ConceptKind::Value(_)) && !dims.is_empty() {
            return Err(ModelError::NotEntityConcept(name.to_string()));
        }
        let mut decls = Vec::new();
        for (i, (dim, domain)) in dims.iter().enumerate() {
            if dims[..i].iter().any(|(d, _)| d == dim) {
                return Err(ModelError::DuplicateDimension(dim.to_string()));
            }
            if *domain == name {
                return Err(ModelError::CycleDetected(name.to_string()));
            }
            let domain_id = self
                .concept_by_name(domain)
                .ok_or_else(|| ModelError::UnknownDomain(domain.to_string()))?;
            decls.push(DimensionDecl {
                name: dim.to_string(),
                domain: domain_id,
            });
        }
        let id = ConceptId(self.concepts.len() as u32);
        self.concepts.push(Concept {
            name: name.to_string(),
            kind,
            dims: decls,
        });
        self.items.push(ItemStore::default());
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn set_bottom(&mut self, concept: ConceptId) {
        self.designated_bottom = Some(concept);
    }

    /// The designated bottom concept, or the unique minimal concept
    /// (one no dimension points to) when none is designated.
    pub fn bottom(&self) -> Result<ConceptId, ModelError> {
        if let Some(b) = self.designated_bottom {
            return Ok(b);
        }
        let mut has_sub: HashSet<ConceptId> = HashSet::new();
        for c in &self.concepts {
            for d in &c.dims {
                has_sub.insert(d.domain);
            }
        }
        let minimal: Vec<ConceptId> = self
            .concept_ids()
            .filter(|id| !has_sub.contains(id))
            .collect();
        match minimal.as_slice() {
            [only] => Ok(*only),
            _ => Err(ModelError::NoBottom),
        }
    }

    pub fn explicit_bottom(&self) -> Option<ConceptId> {
        self.designated_bottom
    }

    // ------------------------------------------------------------------
    // Items

    pub fn add_item(
        &mut self,
        concept: ConceptId,
        key: &str,
        slots: &[(&str, Option<ItemRef>)],
    ) -> Result<ItemRef, ModelError> {
        let cdef = self.concept(concept).clone();
        if cdef.is_value() {
            return Err(ModelError::NotEntityConcept(cdef.name.clone()));
        }
        if self.items[concept.0 as usize].by_key.contains_key(key) {
            return Err(ModelError::DuplicateItem {
                concept: cdef.name.clone(),
                id: key.to_string(),
            });
        }
        let mut vec: Vec<Option<ItemRef>> = vec![None; cdef.dims.len()];
        for (dim, value) in slots {
            let idx = cdef.dim_index(dim).ok_or_else(|| ModelError::UnknownDimension {
                concept: cdef.name.clone(),
                dim: dim.to_string(),
            })?;
            if let Some(r) = value {
                if r.concept != cdef.dims[idx].domain {
                    return Err(ModelError::DomainViolation {
                        id: key.to_string(),
                        dim: dim.to_string(),
                        expected: self.concept(cdef.dims[idx].domain).name.clone(),
                        actual: self.concept(r.concept).name.clone(),
                    });
                }
                if !self.is_live(*r) {
                    return Err(ModelError::UnknownReferent {
                        concept: self.concept(r.concept).name.clone(),
                        key: format!("#{}", r.serial),
                    });
                }
            }
            vec[idx] = *value;
        }
        let store = &mut self.items[concept.0 as usize];
        let serial = store.next;
        store.next += 1;
        store.by_serial.insert(
            serial,
            ItemData {
                key: key.to_string(),
                slots: vec,
                value: None,
            },
        );
        store.by_key.insert(key.to_string(), serial);
        Ok(ItemRef { concept, serial })
    }

    /// Fetch or create the value-concept item identified by `literal`.
    pub fn ensure_value(&mut self, concept: ConceptId, literal: Literal) -> Result<ItemRef, ModelError> {
        let cdef = self.concept(concept);
        let ConceptKind::Value(kind) = cdef.kind else {
            return Err(ModelError::NotValueConcept(cdef.name.clone()));
        };
        if !literal.kind_matches(kind) {
            return Err(ModelError::ValueKindMismatch(kind, cdef.name.clone()));
        }
        // Normalize decimals so that equal values share one identity.
        let literal = match literal {
            Literal::Dec(d) => Literal::Dec(d.normalize()),
            other => other,
        };
        let key = literal.canonical();
        let store = &mut self.items[concept.0 as usize];
        if let Some(&serial) = store.by_key.get(&key) {
            return Ok(ItemRef { concept, serial });
        }
        let serial = store.next;
        store.next += 1;
        store.by_serial.insert(
            serial,
            ItemData {
                key,
                slots: Vec::new(),
                value: Some(literal),
            },
        );
        let data = &store.by_serial[&serial];
        store.by_key.insert(data.key.clone(), serial);
        Ok(ItemRef { concept, serial })
    }

    /// Resolve a slot token for the given domain: looks up entity items
    /// by key and creates value items from literals on first reference.
    pub fn resolve_slot(&mut self, domain: ConceptId, token: &str) -> Result<ItemRef, ModelError> {
        match self.concept(domain).kind {
            ConceptKind::Value(kind) => {
                let lit = Literal::parse_for(kind, token).ok_or_else(|| {
                    ModelError::ValueKindMismatch(kind, self.concept(domain).name.clone())
                })?;
                self.ensure_value(domain, lit)
            }
            ConceptKind::Entity => {
                self.item_by_key(domain, token)
                    .ok_or_else(|| ModelError::UnknownReferent {
                        concept: self.concept(domain).name.clone(),
                        key: token.to_string(),
                    })
            }
        }
    }

    pub fn delete_item(&mut self, item: ItemRef) -> Result<(), ModelError> {
        if !self.is_live(item) {
            return Err(ModelError::UnknownItem);
        }
        for cid in self.concept_ids() {
            for (_, data) in &self.items[cid.0 as usize].by_serial {
                if data.slots.iter().any(|s| *s == Some(item)) {
                    return Err(ModelError::ItemInUse(self.key_of(item).to_string()));
                }
            }
        }
        let store = &mut self.items[item.concept.0 as usize];
        let data = store.by_serial.shift_remove(&item.serial).expect("live item");
        store.by_key.remove(&data.key);
        Ok(())
    }

    pub fn is_live(&self, item: ItemRef) -> bool {
        (item.concept.0 as usize) < self.items.len()
            && self.items[item.concept.0 as usize]
                .by_serial
                .contains_key(&item.serial)
    }

    pub fn items(&self, concept: ConceptId) -> impl Iterator<Item = ItemRef> + '_ {
        self.items[concept.0 as usize]
            .by_serial
            .keys()
            .map(move |&serial| ItemRef { concept, serial })
    }

    pub fn item_count(&self, concept: ConceptId) -> usize {
        self.items[concept.0 as usize].by_serial.len()
    }

    pub fn total_items(&self) -> usize {
        self.items.iter().map(|s| s.by_serial.len()).sum()
    }

    pub fn item_by_key(&self, concept: ConceptId, key: &str) -> Option<ItemRef> {
        self.items[concept.0 as usize]
            .by_key
            .get(key)
            .map(|&serial| ItemRef { concept, serial })
    }

    fn data(&self, item: ItemRef) -> &ItemData {
        &self.items[item.concept.0 as usize].by_serial[&item.serial]
    }

    pub fn key_of(&self, item: ItemRef) -> &str {
        &self.data(item).key
    }

    pub fn value_of(&self, item: ItemRef) -> Option<&Literal> {
        self.data(item).value.as_ref()
    }

    pub fn slots_of(&self, item: ItemRef) -> &[Option<ItemRef>] {
        &self.data(item).slots
    }

    pub fn get_slot(&self, item: ItemRef, dim: &str) -> Result<Option<ItemRef>, ModelError> {
        let cdef = self.concept(item.concept);
        let idx = cdef.dim_index(dim).ok_or_else(|| ModelError::UnknownDimension {
            concept: cdef.name.clone(),
            dim: dim.to_string(),
        })?;
        Ok(self.data(item).slots[idx])
    }

    /// Null-propagating slot walk along an upward label path.
    pub fn walk(&self, item: ItemRef, path: &DimPath) -> Result<Option<ItemRef>, ModelError> {
        let mut cur = item;
        for label in &path.0 {
            match self.get_slot(cur, label)? {
                Some(next) => cur = next,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }

    // ------------------------------------------------------------------
    // Concept graph

    /// The concept-level labelled ordered set: concepts as elements,
    /// dimensions as edges, in schema insertion order.
    pub fn concept_oset(&self) -> OrderedSet {
        let mut set = OrderedSet::new();
        // Concepts may be declared in any order; insert in topological
        // order so that supers exist first.
        let order = self.concept_topo_order().unwrap_or_else(|_| {
            // On a cyclic graph fall back to declaration order; the
            //(unreachable) edges to not-yet-inserted concepts are dropped.
            self.concept_ids().collect()
        });
        for cid in order {
            let c = self.concept(cid);
            let supers: Vec<(String, Option<crate::oset::ElementId>)> = c
                .dims
                .iter()
                .filter_map(|d| {
                    set.lookup(&self.concept(d.domain).name)
                        .map(|el| (d.name.clone(), Some(el)))
                })
                .collect();
            let combo = crate::oset::Combination::new(supers).expect("labels unique");
            let _ = set.add_element(&c.name, &combo);
        }
        set
    }

    /// Concepts ordered so that domains come before their sub-concepts.
    fn concept_topo_order(&self) -> Result<Vec<ConceptId>, ModelError> {
        let n = self.concepts.len();
        let mut indeg = vec![0usize; n];
        // Edge C -> Dom(x); process domains first, i.e. reverse topo of
        // the dimension graph.
        let mut dependants: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, c) in self.concepts.iter().enumerate() {
            for d in &c.dims {
                indeg[i] += 1;
                dependants[d.domain.0 as usize].push(i);
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        queue.reverse();
        let mut order = Vec::new();
        while let Some(i) = queue.pop() {
            order.push(ConceptId(i as u32));
            for &dep in &dependants[i] {
                indeg[dep] -= 1;
                if indeg[dep] == 0 {
                    queue.push(dep);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            let stuck = (0..n).find(|&i| indeg[i] > 0).unwrap();
            Err(ModelError::CycleDetected(self.concepts[stuck].name.clone()))
        }
    }

    /// All label paths in the concept graph from `from` upward to `to`;
    /// `None` targets the synthetic top over the primitive concepts.
    pub fn concept_paths(&self, from: ConceptId, to: Option<ConceptId>) -> Result<Vec<DimPath>, ModelError> {
        let oset = self.concept_oset();
        let from_el = oset
            .lookup(&self.concept(from).name)
            .ok_or_else(|| ModelError::UnknownConcept(self.concept(from).name.clone()))?;
        let to_el = match to {
            Some(c) => oset
                .lookup(&self.concept(c).name)
                .ok_or_else(|| ModelError::UnknownConcept(self.concept(c).name.clone()))?,
            None => oset.top(),
        };
        Ok(oset.paths_between(from_el, to_el, Direction::Up).expect("elements exist"))
    }

    /// Follow a label path in the concept graph; errors on a missing
    /// dimension.
    pub fn path_target(&self, from: ConceptId, path: &DimPath) -> Result<ConceptId, ModelError> {
        let mut cur = from;
        for label in &path.0 {
            let cdef = self.concept(cur);
            let idx = cdef.dim_index(label).ok_or_else(|| ModelError::UnknownDimension {
                concept: cdef.name.clone(),
                dim: label.clone(),
            })?;
            cur = cdef.dims[idx].domain;
        }
        Ok(cur)
    }

    /// Concepts reachable upward from `from` (inclusive).
    pub fn reachable_up(&self, from: ConceptId) -> HashSet<ConceptId> {
        let mut seen = HashSet::new();
        let mut stack = vec![from];
        while let Some(c) = stack.pop() {
            if seen.insert(c) {
                for d in &self.concept(c).dims {
                    stack.push(d.domain);
                }
            }
        }
        seen
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if let Err(ModelError::CycleDetected(name)) = self.concept_topo_order() {
            report.violations.push(Violation::Cycle(name));
        }
        for cid in self.concept_ids() {
            let c = self.concept(cid);
            for (i, d) in c.dims.iter().enumerate() {
                if (d.domain.0 as usize) >= self.concepts.len() {
                    report.violations.push(Violation::DanglingDomain {
                        concept: c.name.clone(),
                        dim: d.name.clone(),
                    });
                }
                if c.dims[..i].iter().any(|other| other.name == d.name) {
                    report.violations.push(Violation::DuplicateLabel {
                        concept: c.name.clone(),
                        dim: d.name.clone(),
                    });
                }
            }
            for item in self.items(cid) {
                let data = self.data(item);
                for (idx, slot) in data.slots.iter().enumerate() {
                    let Some(r) = slot else { continue };
                    if !self.is_live(*r) {
                        report.violations.push(Violation::UnknownReferent {
                            concept: c.name.clone(),
                            id: data.key.clone(),
                            dim: c.dims[idx].name.clone(),
                        });
                    } else if r.concept != c.dims[idx].domain {
                        report.violations.push(Violation::SyntacticBreach {
                            concept: c.name.clone(),
                            id: data.key.clone(),
                            dim: c.dims[idx].name.clone(),
                        });
                    }
                }
            }
        }
        match self.bottom() {
            Ok(bottom) => {
                let reachable = self.reachable_up(bottom);
                for cid in self.concept_ids() {
                    if !reachable.contains(&cid) {
                        report
                            .warnings
                            .push(Violation::UnreachableConcept(self.concept(cid).name.clone()));
                    }
                }
            }
            Err(_) => {
                if !self.concepts.is_empty() {
                    report.warnings.push(Violation::MissingBottom);
                }
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_dim_space() -> (Schema, ConceptId, ConceptId, ConceptId) {
        let mut s = Schema::new("fig7");
        let x = s.define_concept("X", ConceptKind::Value(ValueKind::Int), &[]).unwrap();
        let y = s.define_concept("Y", ConceptKind::Value(ValueKind::Int), &[]).unwrap();
        let z = s
            .define_concept("Z", ConceptKind::Entity, &[("x", "X"), ("y", "Y")])
            .unwrap();
        (s, x, y, z)
    }

    #[test]
    fn define_and_cycles() {
        let (mut s, ..) = two_dim_space();
        assert_eq!(
            s.define_concept("X", ConceptKind::Entity, &[]),
            Err(ModelError::DuplicateConcept("X".into()))
        );
        assert_eq!(
            s.define_concept("A", ConceptKind::Entity, &[("a", "A")]),
            Err(ModelError::CycleDetected("A".into()))
        );
        assert_eq!(
            s.define_concept("B", ConceptKind::Entity, &[("d", "NoSuch")]),
            Err(ModelError::UnknownDomain("NoSuch".into()))
        );
    }

    #[test]
    fn items_and_slots() {
        let (mut s, x, _y, z) = two_dim_space();
        let one = s.ensure_value(x, Literal::Int(1)).unwrap();
        let again = s.ensure_value(x, Literal::Int(1)).unwrap();
        assert_eq!(one, again);
        let p = s.add_item(z, "p1", &[("x", Some(one))]).unwrap();
        assert_eq!(s.get_slot(p, "x").unwrap(), Some(one));
        assert_eq!(s.get_slot(p, "y").unwrap(), None);
        assert_eq!(
            s.get_slot(p, "zz").unwrap_err(),
            ModelError::UnknownDimension {
                concept: "Z".into(),
                dim: "zz".into()
            }
        );
        // all-null item is accepted
        s.add_item(z, "p2", &[]).unwrap();
        // wrong domain
        let value_of_x = s.ensure_value(x, Literal::Int(9)).unwrap();
        let err = s.add_item(z, "p3", &[("y", Some(value_of_x))]).unwrap_err();
        assert!(matches!(err, ModelError::DomainViolation { .. }));
    }

    #[test]
    fn deletion_guard() {
        let (mut s, x, _y, z) = two_dim_space();
        let one = s.ensure_value(x, Literal::Int(1)).unwrap();
        let p = s.add_item(z, "p1", &[("x", Some(one))]).unwrap();
        assert_eq!(s.delete_item(one), Err(ModelError::ItemInUse("1".into())));
        s.delete_item(p).unwrap();
        s.delete_item(one).unwrap();
        assert_eq!(s.total_items(), 0);
    }

    #[test]
    fn bottom_autodesignation() {
        let (s, _x, _y, z) = two_dim_space();
        assert_eq!(s.bottom().unwrap(), z);
        let mut s2 = Schema::new("twomin");
        s2.define_concept("A", ConceptKind::Entity, &[]).unwrap();
        s2.define_concept("B", ConceptKind::Entity, &[]).unwrap();
        assert_eq!(s2.bottom(), Err(ModelError::NoBottom));
        let a = s2.concept_by_name("A").unwrap();
        s2.set_bottom(a);
        assert_eq!(s2.bottom().unwrap(), a);
    }

    #[test]
    fn concept_paths_and_validate() {
        let (s, _x, _y, z) = two_dim_space();
        let report = s.validate();
        assert!(report.is_clean(), "{report:?}");
        // Z to itself: the empty path; Z to top: via x and via y.
        assert_eq!(s.concept_paths(z, Some(z)).unwrap(), vec![DimPath::empty()]);
        assert_eq!(s.concept_paths(z, None).unwrap().len(), 2);
    }

    #[test]
    fn validate_reports_dangling_referent() {
        let (mut s, x, _y, z) = two_dim_space();
        let one = s.ensure_value(x, Literal::Int(1)).unwrap();
        s.add_item(z, "p1", &[("x", Some(one))]).unwrap();
        // Forcibly remove the value item to simulate a corrupted store.
        let store = &mut s.items[x.0 as usize];
        store.by_serial.shift_remove(&one.serial);
        store.by_key.remove("1");
        let report = s.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::UnknownReferent { .. })));
    }
}
