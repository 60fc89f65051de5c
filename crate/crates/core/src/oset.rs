//! One-level labelled ordered sets.
//!
//! Elements are defined as labelled combinations of their super-elements.
//! The edge graph is a strict order (a DAG); two synthetic elements `top`
//! and `bottom` are always materialized so that order metrics and path
//! enumeration are total: every element without outgoing user edges gets
//! one synthetic edge to `top`, every element without incoming user edges
//! gets one synthetic edge from `bottom`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Reserved symbol of the synthetic greatest element.
pub const TOP_SYMBOL: &str = "top";
/// Reserved symbol of the synthetic least element.
pub const BOTTOM_SYMBOL: &str = "bottom";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OsetError {
    #[error("duplicate element id `{0}`")]
    DuplicateId(String),
    #[error("unknown super-element `{0}`")]
    UnknownSuper(String),
    #[error("cycle detected at `{0}`")]
    CycleDetected(String),
    #[error("duplicate dimension label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("unknown dimension label `{0}`")]
    UnknownLabel(String),
    #[error("combinations do not share the same label set")]
    LabelMismatch,
    #[error("`{0}` is a reserved name")]
    ReservedName(String),
}

/// Identifier of an element within one ordered set. Symbols are unique,
/// so id equality coincides with symbol equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementId(pub(crate) u32);

/// A dot-separated sequence of dimension labels; `rank` is its length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DimPath(pub Vec<String>);

impl DimPath {
    pub fn empty() -> Self {
        DimPath(Vec::new())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> DimPath {
        DimPath(self.0.iter().rev().cloned().collect())
    }

    pub fn join(&self, other: &DimPath) -> DimPath {
        let mut labels = self.0.clone();
        labels.extend(other.0.iter().cloned());
        DimPath(labels)
    }

    /// Parse a dotted path; the empty string is the empty path.
    pub fn parse(text: &str) -> DimPath {
        if text.is_empty() {
            DimPath::empty()
        } else {
            DimPath(text.split('.').map(str::to_string).collect())
        }
    }
}

impl fmt::Display for DimPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("."))
    }
}

impl<S: Into<String>> FromIterator<S> for DimPath {
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        DimPath(iter.into_iter().map(Into::into).collect())
    }
}

/// A labelled edge of the order graph. `synthetic` edges connect to the
/// formal top/bottom elements and are recomputed, never stored by users.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub label: String,
    pub source: ElementId,
    pub target: ElementId,
    pub synthetic: bool,
}

/// One binding of a combination: a label and a super-element or the
/// null marker (absence along that dimension).
pub type Binding = (String, Option<ElementId>);

/// An element definition: a labelled combination of super-elements.
/// Null bindings are permitted and denote absence.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Combination {
    bindings: Vec<Binding>,
}

impl Combination {
    pub fn new(bindings: Vec<Binding>) -> Result<Self, OsetError> {
        for (i, (label, _)) in bindings.iter().enumerate() {
            if bindings[..i].iter().any(|(l, _)| l == label) {
                return Err(OsetError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Combination { bindings })
    }

    pub fn empty() -> Self {
        Combination::default()
    }

    pub fn bindings(&self) -> &[Binding] {
        &self.bindings
    }

    pub fn get(&self, label: &str) -> Option<Option<ElementId>> {
        self.bindings
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, v)| *v)
    }

    /// Remove one dimension from the representation.
    pub fn reduce(&self, label: &str) -> Result<Combination, OsetError> {
        if self.get(label).is_none() {
            return Err(OsetError::UnknownLabel(label.to_string()));
        }
        Ok(Combination {
            bindings: self
                .bindings
                .iter()
                .filter(|(l, _)| l != label)
                .cloned()
                .collect(),
        })
    }

    /// Add a new dimension to the definition. A null value keeps the
    /// combination semantically equivalent to the original.
    pub fn extend(&self, label: &str, value: Option<ElementId>) -> Result<Combination, OsetError> {
        if self.get(label).is_some() {
            return Err(OsetError::DuplicateLabel(label.to_string()));
        }
        let mut bindings = self.bindings.clone();
        bindings.push((label.to_string(), value));
        Ok(Combination { bindings })
    }
}

#[derive(Debug, Clone)]
struct ElementData {
    symbol: String,
    /// Outgoing user edges in insertion order: (label, target).
    out: Vec<(String, ElementId)>,
    /// Incoming user edges: (label, source).
    inc: Vec<(String, ElementId)>,
}

/// Order metrics of one element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    /// Number of outgoing edges (local dimensions).
    pub dimensionality: usize,
    /// Number of incoming edges.
    pub cardinality: usize,
    /// Number of upward paths to top.
    pub primitive_dimensionality: usize,
    /// Number of downward paths to bottom.
    pub primitive_cardinality: usize,
    /// Number of upward paths to every direct or indirect super-element.
    pub canonical_dimensionality: usize,
    /// Number of downward paths to every direct or indirect sub-element.
    pub canonical_cardinality: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

/// A row of the binary primitive-semantics table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryRow {
    pub source: ElementId,
    /// Sub-dimension that produced the row, as labels from bottom up to
    /// the source element.
    pub sub_dimension: DimPath,
    pub bits: Vec<bool>,
}

/// The flattened canonical semantics of a one-level model: columns are
/// bottom-to-top paths, rows are generated per element per sub-dimension.
/// Top is excluded from row generation; the bottom element contributes
/// one all-ones row via its empty sub-dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryTable {
    pub columns: Vec<DimPath>,
    pub rows: Vec<BinaryRow>,
}

impl BinaryTable {
    pub fn column_index(&self, path: &DimPath) -> Option<usize> {
        self.columns.iter().position(|c| c == path)
    }

    /// Rows produced by one element, in table order.
    pub fn rows_of(&self, e: ElementId) -> Vec<&BinaryRow> {
        self.rows.iter().filter(|r| r.source == e).collect()
    }

    /// Induced specific-general relation between rows: `a` is more
    /// specific than (below) `b` when `a` has a 1 wherever `b` does.
    pub fn row_leq(&self, a: &BinaryRow, b: &BinaryRow) -> bool {
        a.bits
            .iter()
            .zip(b.bits.iter())
            .all(|(ai, bi)| !bi || *ai)
    }
}

/// A labelled ordered set with synthetic top and bottom.
#[derive(Debug, Clone)]
pub struct OrderedSet {
    elements: Vec<ElementData>,
    by_symbol: HashMap<String, ElementId>,
    top: ElementId,
    bottom: ElementId,
}

impl Default for OrderedSet {
    fn default() -> Self {
        Self::new()
    }
}

impl OrderedSet {
    pub fn new() -> Self {
        let mut set = OrderedSet {
            elements: Vec::new(),
            by_symbol: HashMap::new(),
            top: ElementId(0),
            bottom: ElementId(1),
        };
        set.elements.push(ElementData {
            symbol: TOP_SYMBOL.to_string(),
            out: Vec::new(),
            inc: Vec::new(),
        });
        set.elements.push(ElementData {
            symbol: BOTTOM_SYMBOL.to_string(),
            out: Vec::new(),
            inc: Vec::new(),
        });
        set.by_symbol.insert(TOP_SYMBOL.to_string(), set.top);
        set.by_symbol.insert(BOTTOM_SYMBOL.to_string(), set.bottom);
        set
    }

    pub fn top(&self) -> ElementId {
        self.top
    }

    pub fn bottom(&self) -> ElementId {
        self.bottom
    }

    pub fn symbol(&self, e: ElementId) -> &str {
        &self.elements[e.0 as usize].symbol
    }

    pub fn lookup(&self, symbol: &str) -> Option<ElementId> {
        self.by_symbol.get(symbol).copied()
    }

    pub fn resolve(&self, symbol: &str) -> Result<ElementId, OsetError> {
        self.lookup(symbol)
            .ok_or_else(|| OsetError::UnknownElement(symbol.to_string()))
    }

    pub fn contains(&self, e: ElementId) -> bool {
        (e.0 as usize) < self.elements.len()
    }

    /// User elements in insertion order (synthetic top/bottom excluded).
    pub fn user_elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        (2..self.elements.len() as u32).map(ElementId)
    }

    pub fn len(&self) -> usize {
        self.elements.len() - 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn is_synthetic(&self, e: ElementId) -> bool {
        e == self.top || e == self.bottom
    }

    /// Insert a new element defined as a combination of existing
    /// super-elements. Null bindings create no edges.
    pub fn add_element(&mut self, symbol: &str, supers: &Combination) -> Result<ElementId, OsetError> {
        if symbol == TOP_SYMBOL || symbol == BOTTOM_SYMBOL {
            return Err(OsetError::ReservedName(symbol.to_string()));
        }
        if self.by_symbol.contains_key(symbol) {
            return Err(OsetError::DuplicateId(symbol.to_string()));
        }
        // Supers must already exist, so the graph stays acyclic by
        // construction; self-reference is caught in `add` by symbol.
        let mut edges: Vec<(String, ElementId)> = Vec::new();
        for (label, value) in supers.bindings() {
            if label == TOP_SYMBOL || label == BOTTOM_SYMBOL {
                return Err(OsetError::ReservedName(label.clone()));
            }
            let Some(value) = value else { continue };
            edges.push((label.clone(), *value));
        }
        for (_, target) in &edges {
            if !self.contains(*target) || self.is_synthetic(*target) {
                return Err(OsetError::UnknownSuper(self.symbol(*target).to_string()));
            }
        }
        let id = ElementId(self.elements.len() as u32);
        self.elements.push(ElementData {
            symbol: symbol.to_string(),
            out: edges.clone(),
            inc: Vec::new(),
        });
        self.by_symbol.insert(symbol.to_string(), id);
        for (label, target) in edges {
            self.elements[target.0 as usize].inc.push((label, id));
        }
        Ok(id)
    }

    /// Convenience: resolve super symbols, then add.
    pub fn add(&mut self, symbol: &str, supers: &[(&str, &str)]) -> Result<ElementId, OsetError> {
        let mut bindings = Vec::new();
        for (label, target) in supers {
            if *target == symbol {
                return Err(OsetError::CycleDetected(symbol.to_string()));
            }
            let id = self
                .lookup(target)
                .ok_or_else(|| OsetError::UnknownSuper(target.to_string()))?;
            bindings.push((label.to_string(), Some(id)));
        }
        let combo = Combination::new(bindings)?;
        self.add_element(symbol, &combo)
    }

    /// Effective outgoing edges, synthetic top edges included.
    pub fn out_edges(&self, e: ElementId) -> Vec<Edge> {
        if e == self.top {
            return Vec::new();
        }
        if e == self.bottom {
            let minimal: Vec<ElementId> = self
                .user_elements()
                .filter(|u| self.elements[u.0 as usize].inc.is_empty())
                .collect();
            if minimal.is_empty() {
                return vec![Edge {
                    label: TOP_SYMBOL.to_string(),
                    source: self.bottom,
                    target: self.top,
                    synthetic: true,
                }];
            }
            return minimal
                .into_iter()
                .map(|u| Edge {
                    label: self.symbol(u).to_string(),
                    source: self.bottom,
                    target: u,
                    synthetic: true,
                })
                .collect();
        }
        let data = &self.elements[e.0 as usize];
        if data.out.is_empty() {
            vec![Edge {
                label: TOP_SYMBOL.to_string(),
                source: e,
                target: self.top,
                synthetic: true,
            }]
        } else {
            data.out
                .iter()
                .map(|(label, target)| Edge {
                    label: label.clone(),
                    source: e,
                    target: *target,
                    synthetic: false,
                })
                .collect()
        }
    }

    /// Effective incoming edges, synthetic bottom edges included.
    pub fn in_edges(&self, e: ElementId) -> Vec<Edge> {
        if e == self.bottom {
            return Vec::new();
        }
        if e == self.top {
            let maximal: Vec<ElementId> = self
                .user_elements()
                .filter(|u| self.elements[u.0 as usize].out.is_empty())
                .collect();
            if maximal.is_empty() {
                return vec![Edge {
                    label: TOP_SYMBOL.to_string(),
                    source: self.bottom,
                    target: self.top,
                    synthetic: true,
                }];
            }
            return maximal
                .into_iter()
                .map(|u| Edge {
                    label: TOP_SYMBOL.to_string(),
                    source: u,
                    target: self.top,
                    synthetic: true,
                })
                .collect();
        }
        let data = &self.elements[e.0 as usize];
        let mut edges: Vec<Edge> = data
            .inc
            .iter()
            .map(|(label, source)| Edge {
                label: label.clone(),
                source: *source,
                target: e,
                synthetic: false,
            })
            .collect();
        if data.inc.is_empty() {
            edges.push(Edge {
                label: self.symbol(e).to_string(),
                source: self.bottom,
                target: e,
                synthetic: true,
            });
        }
        edges
    }

    /// Strict order: true when a directed path of edges leads from `a`
    /// up to `b`.
    pub fn less_than(&self, a: ElementId, b: ElementId) -> Result<bool, OsetError> {
        if !self.contains(a) {
            return Err(OsetError::UnknownElement(format!("#{}", a.0)));
        }
        if !self.contains(b) {
            return Err(OsetError::UnknownElement(format!("#{}", b.0)));
        }
        if a == b {
            return Ok(false);
        }
        let mut stack = vec![a];
        let mut seen = vec![false; self.elements.len()];
        while let Some(e) = stack.pop() {
            for edge in self.out_edges(e) {
                let t = edge.target;
                if t == b {
                    return Ok(true);
                }
                if !seen[t.0 as usize] {
                    seen[t.0 as usize] = true;
                    stack.push(t);
                }
            }
        }
        Ok(false)
    }

    fn count_paths_to(&self, from: ElementId, to: ElementId, memo: &mut HashMap<ElementId, usize>) -> usize {
        if from == to {
            return 1;
        }
        if let Some(&n) = memo.get(&from) {
            return n;
        }
        let n = self
            .out_edges(from)
            .iter()
            .map(|edge| self.count_paths_to(edge.target, to, memo))
            .sum();
        memo.insert(from, n);
        n
    }

    fn count_all_paths(&self, from: ElementId, dir: Direction, memo: &mut HashMap<ElementId, usize>) -> usize {
        if let Some(&n) = memo.get(&from) {
            return n;
        }
        let edges = match dir {
            Direction::Up => self.out_edges(from),
            Direction::Down => self.in_edges(from),
        };
        let n = edges
            .iter()
            .map(|edge| {
                let next = match dir {
                    Direction::Up => edge.target,
                    Direction::Down => edge.source,
                };
                1 + self.count_all_paths(next, dir, memo)
            })
            .sum();
        memo.insert(from, n);
        n
    }

    pub fn metrics(&self, e: ElementId) -> Result<Metrics, OsetError> {
        if !self.contains(e) {
            return Err(OsetError::UnknownElement(format!("#{}", e.0)));
        }
        let mut up = HashMap::new();
        let mut down = HashMap::new();
        let mut canon_up = HashMap::new();
        let mut canon_down = HashMap::new();
        Ok(Metrics {
            dimensionality: self.out_edges(e).len(),
            cardinality: self.in_edges(e).len(),
            primitive_dimensionality: self.count_paths_to(e, self.top, &mut up),
            primitive_cardinality: self.count_paths_down_to(e, self.bottom, &mut down),
            canonical_dimensionality: self.count_all_paths(e, Direction::Up, &mut canon_up),
            canonical_cardinality: self.count_all_paths(e, Direction::Down, &mut canon_down),
        })
    }

    fn count_paths_down_to(&self, from: ElementId, to: ElementId, memo: &mut HashMap<ElementId, usize>) -> usize {
        if from == to {
            return 1;
        }
        if let Some(&n) = memo.get(&from) {
            return n;
        }
        let n = self
            .in_edges(from)
            .iter()
            .map(|edge| self.count_paths_down_to(edge.source, to, memo))
            .sum();
        memo.insert(from, n);
        n
    }

    /// All label paths from `e` in the given direction, every rank, to
    /// every reachable element. Labels appear in walk order.
    pub fn enumerate_paths(&self, e: ElementId, dir: Direction) -> Result<Vec<DimPath>, OsetError> {
        if !self.contains(e) {
            return Err(OsetError::UnknownElement(format!("#{}", e.0)));
        }
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.walk_paths(e, dir, &mut prefix, &mut out, None);
        Ok(out)
    }

    /// Label paths from `e` that terminate at `target`.
    pub fn paths_between(&self, e: ElementId, target: ElementId, dir: Direction) -> Result<Vec<DimPath>, OsetError> {
        if !self.contains(e) || !self.contains(target) {
            return Err(OsetError::UnknownElement("paths_between".to_string()));
        }
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        if e == target {
            out.push(DimPath::empty());
        }
        self.walk_paths(e, dir, &mut prefix, &mut out, Some(target));
        Ok(out)
    }

    fn walk_paths(
        &self,
        e: ElementId,
        dir: Direction,
        prefix: &mut Vec<String>,
        out: &mut Vec<DimPath>,
        target: Option<ElementId>,
    ) {
        let edges = match dir {
            Direction::Up => self.out_edges(e),
            Direction::Down => self.in_edges(e),
        };
        for edge in edges {
            let next = match dir {
                Direction::Up => edge.target,
                Direction::Down => edge.source,
            };
            prefix.push(edge.label.clone());
            match target {
                None => out.push(DimPath(prefix.clone())),
                Some(t) if next == t => out.push(DimPath(prefix.clone())),
                _ => {}
            }
            self.walk_paths(next, dir, prefix, out, target);
            prefix.pop();
        }
    }

    /// Walk one upward label path from `e`; None when a label is missing.
    pub fn walk_up(&self, e: ElementId, path: &DimPath) -> Option<ElementId> {
        let mut cur = e;
        for label in &path.0 {
            let next = self
                .out_edges(cur)
                .into_iter()
                .find(|edge| edge.label == *label)?;
            cur = next.target;
        }
        Some(cur)
    }

    /// Induced specific-general relation on combinations sharing one
    /// label set: true when for every label, `b`'s binding is null or
    /// equals/dominates `a`'s binding.
    pub fn induced_leq(&self, a: &Combination, b: &Combination) -> Result<bool, OsetError> {
        if a.bindings().len() != b.bindings().len() {
            return Err(OsetError::LabelMismatch);
        }
        for (label, bv) in b.bindings() {
            let Some(av) = a.get(label) else {
                return Err(OsetError::LabelMismatch);
            };
            match (av, bv) {
                (_, None) => {}
                (None, Some(_)) => return Ok(false),
                (Some(ai), Some(bi)) => {
                    if ai != *bi && !self.less_than(ai, *bi)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Topological order over effective edges; error reporting only, the
    /// construction API cannot create cycles.
    pub fn topo_sort(&self) -> Result<Vec<ElementId>, OsetError> {
        let n = self.elements.len();
        let mut indeg = vec![0usize; n];
        for i in 0..n {
            let e = ElementId(i as u32);
            for edge in self.out_edges(e) {
                indeg[edge.target.0 as usize] += 1;
            }
        }
        let mut queue: Vec<ElementId> = (0..n as u32)
            .map(ElementId)
            .filter(|e| indeg[e.0 as usize] == 0)
            .collect();
        let mut order = Vec::new();
        while let Some(e) = queue.pop() {
            order.push(e);
            for edge in self.out_edges(e) {
                let t = edge.target.0 as usize;
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    queue.push(edge.target);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(OsetError::CycleDetected("<set>".to_string()))
        }
    }

    /// The flattened binary primitive-semantics table.
    pub fn flatten_binary(&self) -> BinaryTable {
        let mut columns = self
            .paths_between(self.bottom, self.top, Direction::Up)
            .expect("bottom and top exist");
        columns.sort();
        let col_index: HashMap<&DimPath, usize> =
            columns.iter().enumerate().map(|(i, c)| (c, i)).collect();

        let mut rows = Vec::new();
        let emit = |e: ElementId, rows: &mut Vec<BinaryRow>| {
            // Sub-dimensions from bottom up to e; bottom itself has the
            // single empty sub-dimension.
            let mut subs: Vec<DimPath> = self
                .paths_between(e, self.bottom, Direction::Down)
                .expect("element exists")
                .iter()
                .map(DimPath::reversed)
                .collect();
            subs.sort();
            let supers = self
                .paths_between(e, self.top, Direction::Up)
                .expect("element exists");
            for sub in subs {
                let mut bits = vec![false; columns.len()];
                for d in &supers {
                    let full = sub.join(d);
                    if let Some(&i) = col_index.get(&full) {
                        bits[i] = true;
                    }
                }
                rows.push(BinaryRow {
                    source: e,
                    sub_dimension: sub,
                    bits,
                });
            }
        };
        for e in self.user_elements() {
            emit(e, &mut rows);
        }
        emit(self.bottom, &mut rows);
        BinaryTable { columns, rows }
    }
}
