//! Canonical primitive semantics of a two-level model.
//!
//! The hierarchical space is flattened into a table whose columns are the
//! label paths from the bottom concept to primitive concepts. Every item
//! contributes one row per concept-level sub-dimension from bottom to its
//! concept; cells hold the composed slot walks (null anywhere along a
//! walk yields null). Columns are ordered canonically: primitive concept
//! name first, then path labels, so output is byte-stable.

use std::collections::HashMap;

use crate::model::{ConceptId, ItemRef, ModelError, Schema};
use crate::oset::DimPath;

/// One column of the primitive table: a bottom-to-primitive path and the
/// primitive concept it draws values from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub path: DimPath,
    pub concept: ConceptId,
}

/// One row: the source item, the concept-level sub-dimension that
/// produced it, and one cell per column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub item: ItemRef,
    pub sub_dimension: DimPath,
    pub cells: Vec<Option<ItemRef>>,
}

/// The flattened model semantics over primitive dimension paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitiveTable {
    pub bottom: ConceptId,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    /// Pairs of same-concept items with identical slot vectors; relations
    /// like coverage are only meaningful when this is empty.
    pub duplicates: Vec<(ItemRef, ItemRef)>,
    /// Concepts skipped because they are not reachable upward from bottom.
    pub skipped: Vec<ConceptId>,
}

/// Per-primitive-dimension values of one item: every upward path to a
/// primitive concept that composes to a non-null value.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrimitiveSignature {
    pub pairs: Vec<(DimPath, ItemRef)>,
}

/// Primitive concepts (no dimensions) sorted by name.
fn primitive_concepts(schema: &Schema) -> Vec<ConceptId> {
    let mut prims: Vec<ConceptId> = schema
        .concept_ids()
        .filter(|c| schema.concept(*c).dims.is_empty())
        .collect();
    prims.sort_by(|a, b| schema.concept(*a).name.cmp(&schema.concept(*b).name));
    prims
}

/// Upward paths from `concept` to each primitive concept, canonically
/// sorted. A primitive concept contributes its own empty path.
fn primitive_paths(schema: &Schema, concept: ConceptId) -> Vec<(DimPath, ConceptId)> {
    let mut out = Vec::new();
    for prim in primitive_concepts(schema) {
        let mut paths = schema
            .concept_paths(concept, Some(prim))
            .expect("concepts exist");
        paths.sort();
        for p in paths {
            out.push((p, prim));
        }
    }
    out
}

/// Flatten the model over the given bottom concept.
pub fn flatten(schema: &Schema, bottom: ConceptId) -> PrimitiveTable {
    let columns: Vec<Column> = primitive_paths(schema, bottom)
        .into_iter()
        .map(|(path, concept)| Column { path, concept })
        .collect();
    let col_index: HashMap<&DimPath, usize> = columns
        .iter()
        .enumerate()
        .map(|(i, c)| (&c.path, i))
        .collect();

    let reachable = schema.reachable_up(bottom);
    let mut concept_order: Vec<ConceptId> = schema.concept_ids().collect();
    concept_order.sort_by(|a, b| schema.concept(*a).name.cmp(&schema.concept(*b).name));

    let mut rows = Vec::new();
    let mut duplicates = Vec::new();
    let mut skipped = Vec::new();
    for cid in concept_order {
        if !reachable.contains(&cid) {
            skipped.push(cid);
            continue;
        }
        let subs = {
            let mut subs = schema.concept_paths(bottom, Some(cid)).expect("concepts exist");
            subs.sort();
            subs
        };
        let supers = primitive_paths(schema, cid);
        let mut items: Vec<ItemRef> = schema.items(cid).collect();
        items.sort_by(|a, b| schema.key_of(*a).cmp(schema.key_of(*b)));
        for (i, &a) in items.iter().enumerate() {
            for &b in &items[i + 1..] {
                if !schema.concept(cid).is_value() && schema.slots_of(a) == schema.slots_of(b) {
                    duplicates.push((a, b));
                }
            }
        }
        for item in items {
            for sub in &subs {
                let mut cells = vec![None; columns.len()];
                for (d, _) in &supers {
                    let full = sub.join(d);
                    let idx = col_index[&full];
                    cells[idx] = schema.walk(item, d).expect("path exists");
                }
                rows.push(Row {
                    item,
                    sub_dimension: sub.clone(),
                    cells,
                });
            }
        }
    }
    PrimitiveTable {
        bottom,
        columns,
        rows,
        duplicates,
        skipped,
    }
}

/// Flatten over the schema's designated or unique-minimal bottom.
pub fn flatten_default(schema: &Schema) -> Result<PrimitiveTable, ModelError> {
    Ok(flatten(schema, schema.bottom()?))
}

impl PrimitiveTable {
    pub fn rows_of(&self, item: ItemRef) -> Vec<&Row> {
        self.rows.iter().filter(|r| r.item == item).collect()
    }

    /// Merged non-null constraints of an item across all of its rows.
    fn constraints_of(&self, item: ItemRef) -> Vec<(usize, ItemRef)> {
        let mut out = Vec::new();
        for row in self.rows_of(item) {
            for (i, cell) in row.cells.iter().enumerate() {
                if let Some(v) = cell {
                    if !out.contains(&(i, *v)) {
                        out.push((i, *v));
                    }
                }
            }
        }
        out
    }

    /// Specific-general relation: `a` is more specific than `b` when some
    /// row of `a` matches every non-null cell of every row of `b`.
    pub fn item_leq(&self, a: ItemRef, b: ItemRef) -> bool {
        let constraints = self.constraints_of(b);
        self.rows_of(a)
            .iter()
            .any(|row| constraints.iter().all(|(i, v)| row.cells[*i] == Some(*v)))
    }

    /// Indices of bottom-concept rows agreeing with the item's non-null
    /// cells on the item's non-null columns.
    pub fn coverage(&self, item: ItemRef) -> Vec<usize> {
        let constraints = self.constraints_of(item);
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, row)| {
                row.item.concept == self.bottom
                    && constraints.iter().all(|(i, v)| row.cells[*i] == Some(*v))
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Render as TSV: dotted column paths, one line per row, nulls as
    /// empty fields, items shown by key.
    pub fn to_tsv(&self, schema: &Schema) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.columns.iter().map(|c| c.path.to_string()).collect();
        out.push_str(&header.join("\t"));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<&str> = row
                .cells
                .iter()
                .map(|c| c.map(|item| schema.key_of(item)).unwrap_or(""))
                .collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}

/// All primitive-path values of one item, null-truncated walks skipped.
pub fn signature(schema: &Schema, item: ItemRef) -> Result<PrimitiveSignature, ModelError> {
    if !schema.is_live(item) {
        return Err(ModelError::UnknownItem);
    }
    let mut pairs = Vec::new();
    for (path, _) in primitive_paths(schema, item.concept) {
        if let Some(v) = schema.walk(item, &path)? {
            pairs.push((path, v));
        }
    }
    Ok(PrimitiveSignature { pairs })
}
