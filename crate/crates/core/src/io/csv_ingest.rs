//! CSV snowflake ingest: each CSV file becomes one concept's items, key
//! columns identify items, and the remaining mapped columns fill slots.
//! Columns mapped to value-concept dimensions auto-create value items;
//! columns mapped to entity dimensions hold the key of an item in the
//! dimension's domain (the foreign key of the snowflake pattern).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{ConceptKind, ItemRef, Schema};
use crate::value::Literal;

use super::IoError;

/// One CSV file mapping: `columns` maps CSV column names to dimension
/// names of the target concept.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct IngestFile {
    pub path: String,
    pub concept: String,
    pub key: String,
    pub columns: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq, Default)]
pub struct IngestMap {
    pub files: Vec<IngestFile>,
}

impl IngestMap {
    pub fn parse_toml(text: &str) -> Result<Self, IoError> {
        toml::from_str(text).map_err(|e| IoError::parse("<ingest map>", 0, e))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("ingest maps serialize")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileReport {
    pub path: String,
    pub created: usize,
    pub skipped: usize,
    pub rejected: usize,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub files: Vec<FileReport>,
}

impl IngestReport {
    pub fn total_created(&self) -> usize {
        self.files.iter().map(|f| f.created).sum()
    }

    pub fn total_rejected(&self) -> usize {
        self.files.iter().map(|f| f.rejected).sum()
    }
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for file in &self.files {
            writeln!(
                f,
                "{}: {} created, {} skipped, {} rejected",
                file.path, file.created, file.skipped, file.rejected
            )?;
            for e in &file.errors {
                writeln!(f, "  {e}")?;
            }
        }
        Ok(())
    }
}

/// RFC 4180 style: comma separated, double quotes escape commas,
/// newlines and doubled quotes. The first record is the header.
pub fn parse_csv(text: &str) -> Result<Vec<Vec<String>>, String> {
    let mut records = Vec::new();
    let mut record: Vec<String> = Vec::new();
    let mut field = String::new();
    let mut chars = text.chars().peekable();
    let mut in_quotes = false;
    let mut any = false;
    while let Some(c) = chars.next() {
        any = true;
        if in_quotes {
            match c {
                '"' => {
                    if chars.peek() == Some(&'"') {
                        chars.next();
                        field.push('"');
                    } else {
                        in_quotes = false;
                    }
                }
                other => field.push(other),
            }
            continue;
        }
        match c {
            '"' => in_quotes = true,
            ',' => {
                record.push(std::mem::take(&mut field));
            }
            '\r' => {}
            '\n' => {
                record.push(std::mem::take(&mut field));
                records.push(std::mem::take(&mut record));
            }
            other => field.push(other),
        }
    }
    if in_quotes {
        return Err("unterminated quoted field".to_string());
    }
    if any && (!field.is_empty() || !record.is_empty()) {
        record.push(field);
        records.push(record);
    }
    Ok(records)
}

/// Ingest the mapped CSV files, in map order, resolving paths relative
/// to `base`. Row-level failures are collected in the report; file-level
/// problems (missing file, bad mapping) abort with an error.
pub fn ingest_csv(schema: &mut Schema, map: &IngestMap, base: &Path) -> Result<IngestReport, IoError> {
    let mut report = IngestReport::default();
    for file in &map.files {
        let path = base.join(&file.path);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| IoError::Read(path.display().to_string(), e.to_string()))?;
        let mut file_report = FileReport {
            path: file.path.clone(),
            ..Default::default()
        };
        let records = parse_csv(&text).map_err(|e| IoError::parse(&file.path, 0, e))?;
        let Some(header) = records.first() else {
            return Err(IoError::parse(&file.path, 1, "missing header row"));
        };
        let concept = schema
            .concept_by_name(&file.concept)
            .ok_or_else(|| IoError::parse(&file.path, 1, format!("unknown concept `{}`", file.concept)))?;
        let key_col = header
            .iter()
            .position(|h| h == &file.key)
            .ok_or_else(|| IoError::parse(&file.path, 1, format!("key column `{}` not in header", file.key)))?;
        // column index -> dimension index
        let mut mapping: Vec<(usize, usize)> = Vec::new();
        for (col, dim) in &file.columns {
            let ci = header
                .iter()
                .position(|h| h == col)
                .ok_or_else(|| IoError::parse(&file.path, 1, format!("column `{col}` not in header")))?;
            let di = schema.concept(concept).dim_index(dim).ok_or_else(|| {
                IoError::parse(
                    &file.path,
                    1,
                    format!("concept `{}` has no dimension `{dim}`", file.concept),
                )
            })?;
            mapping.push((ci, di));
        }
        for (row_no, record) in records.iter().enumerate().skip(1) {
            if record.len() != header.len() {
                file_report.rejected += 1;
                file_report
                    .errors
                    .push(format!("row {}: {} fields, expected {}", row_no + 1, record.len(), header.len()));
                continue;
            }
            let key = record[key_col].as_str();
            if schema.item_by_key(concept, key).is_some() {
                file_report.skipped += 1;
                continue;
            }
            let mut slots: Vec<(String, Option<ItemRef>)> = Vec::new();
            let mut failed = None;
            for &(ci, di) in &mapping {
                let cell = record[ci].trim();
                let dim = schema.concept(concept).dims[di].name.clone();
                if cell.is_empty() {
                    slots.push((dim, None));
                    continue;
                }
                let domain = schema.concept(concept).dims[di].domain;
                let resolved = match schema.concept(domain).kind {
                    ConceptKind::Value(kind) => Literal::parse_for(kind, cell)
                        .ok_or_else(|| format!("row {}: `{cell}` is not a {} literal", row_no + 1, kind))
                        .and_then(|lit| {
                            schema
                                .ensure_value(domain, lit)
                                .map_err(|e| format!("row {}: {e}", row_no + 1))
                        }),
                    ConceptKind::Entity => schema.item_by_key(domain, cell).ok_or_else(|| {
                        format!(
                            "row {}: unknown foreign key `{cell}` in `{}`",
                            row_no + 1,
                            schema.concept(domain).name
                        )
                    }),
                };
                match resolved {
                    Ok(item) => slots.push((dim, Some(item))),
                    Err(message) => {
                        failed = Some(message);
                        break;
                    }
                }
            }
            if let Some(message) = failed {
                file_report.rejected += 1;
                file_report.errors.push(message);
                continue;
            }
            let slots_ref: Vec<(&str, Option<ItemRef>)> =
                slots.iter().map(|(d, v)| (d.as_str(), *v)).collect();
            match schema.add_item(concept, key, &slots_ref) {
                Ok(_) => file_report.created += 1,
                Err(e) => {
                    file_report.rejected += 1;
                    file_report.errors.push(format!("row {}: {e}", row_no + 1));
                }
            }
        }
        report.files.push(file_report);
    }
    Ok(report)
}

/// Render a schema's items as CSV files matching an ingest map; used to
/// produce fixture CSVs that round-trip through `ingest_csv`.
pub fn render_csv(schema: &Schema, file: &IngestFile) -> String {
    let concept = schema.concept_by_name(&file.concept).expect("concept exists");
    let cdef = schema.concept(concept);
    let mut header: Vec<String> = vec![file.key.clone()];
    let mut dims: Vec<usize> = Vec::new();
    for (col, dim) in &file.columns {
        if col == &file.key {
            continue;
        }
        header.push(col.clone());
        dims.push(cdef.dim_index(dim).expect("dimension exists"));
    }
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    let mut items: Vec<ItemRef> = schema.items(concept).collect();
    items.sort_by(|a, b| schema.key_of(*a).cmp(schema.key_of(*b)));
    for item in items {
        let mut cells: Vec<String> = vec![csv_cell(schema.key_of(item))];
        for &di in &dims {
            let cell = match schema.slots_of(item)[di] {
                None => String::new(),
                Some(r) => match schema.value_of(r) {
                    Some(lit) => csv_cell(&lit.canonical()),
                    None => csv_cell(schema.key_of(r)),
                },
            };
            cells.push(cell);
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn csv_cell(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}
