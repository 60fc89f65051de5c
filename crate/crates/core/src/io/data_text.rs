//! The data text format:
//!
//! ```text
//! value Ages 34
//! value Names "Alice"
//! item Employees E01 { name = "Alice" , age = 34 }
//! item Orders O001 { employee = E01 , date = null }
//! ```
//!
//! Entries may appear in any order; references resolve after a full
//! pass. The canonical form sorts entries by concept name then item id
//! and lists every dimension, nulls included.

use std::collections::HashMap;

use crate::model::{ConceptId, ConceptKind, ItemRef, ModelError, Schema};
use crate::value::Literal;

use super::{render_token, IoError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    Assign,
    Comma,
    LBrace,
    RBrace,
}

struct Lexer<'a> {
    file: &'a str,
    chars: Vec<char>,
    pos: usize,
    line: u32,
}

impl<'a> Lexer<'a> {
    fn new(file: &'a str, text: &str) -> Self {
        Lexer {
            file,
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
        }
    }

    fn next(&mut self) -> Result<Option<(Tok, u32)>, IoError> {
        loop {
            let Some(&c) = self.chars.get(self.pos) else {
                return Ok(None);
            };
            if c == '\n' {
                self.line += 1;
                self.pos += 1;
                continue;
            }
            if c.is_whitespace() {
                self.pos += 1;
                continue;
            }
            if c == '#' {
                while self.pos < self.chars.len() && self.chars[self.pos] != '\n' {
                    self.pos += 1;
                }
                continue;
            }
            let line = self.line;
            let tok = match c {
                '=' => {
                    self.pos += 1;
                    Tok::Assign
                }
                ',' => {
                    self.pos += 1;
                    Tok::Comma
                }
                '{' => {
                    self.pos += 1;
                    Tok::LBrace
                }
                '}' => {
                    self.pos += 1;
                    Tok::RBrace
                }
                '"' => {
                    self.pos += 1;
                    let mut s = String::new();
                    loop {
                        match self.chars.get(self.pos) {
                            Some('\\') => {
                                if let Some(&n) = self.chars.get(self.pos + 1) {
                                    s.push(n);
                                    self.pos += 2;
                                } else {
                                    self.pos += 1;
                                }
                            }
                            Some('"') => {
                                self.pos += 1;
                                break;
                            }
                            Some('\n') | None => {
                                return Err(IoError::parse(self.file, line, "unterminated string"))
                            }
                            Some(&c) => {
                                s.push(c);
                                self.pos += 1;
                            }
                        }
                    }
                    Tok::Str(s)
                }
                c if c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.') => {
                    let start = self.pos;
                    while self
                        .chars
                        .get(self.pos)
                        .map(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
                        .unwrap_or(false)
                    {
                        self.pos += 1;
                    }
                    Tok::Word(self.chars[start..self.pos].iter().collect())
                }
                other => {
                    return Err(IoError::parse(
                        self.file,
                        line,
                        format!("unexpected character `{other}`"),
                    ))
                }
            };
            return Ok(Some((tok, line)));
        }
    }
}

#[derive(Debug)]
enum SlotText {
    Null,
    Token(String),
}

#[derive(Debug)]
struct ItemEntry {
    concept: String,
    id: String,
    slots: Vec<(String, SlotText)>,
    line: u32,
}

/// Parse a data file into an existing schema.
pub fn parse_data(schema: &mut Schema, file: &str, text: &str) -> Result<(), IoError> {
    let mut lexer = Lexer::new(file, text);
    let mut items: Vec<ItemEntry> = Vec::new();

    loop {
        let Some((tok, line)) = lexer.next()? else { break };
        match tok {
            Tok::Word(w) if w == "value" => {
                let Some((Tok::Word(concept), _)) = lexer.next()? else {
                    return Err(IoError::parse(file, line, "expected concept name"));
                };
                let literal = match lexer.next()? {
                    Some((Tok::Word(w), _)) => w,
                    Some((Tok::Str(s), _)) => s,
                    _ => return Err(IoError::parse(file, line, "expected literal")),
                };
                let cid = schema
                    .concept_by_name(&concept)
                    .ok_or_else(|| IoError::model(file, line, ModelError::UnknownConcept(concept.clone())))?;
                let ConceptKind::Value(kind) = schema.concept(cid).kind else {
                    return Err(IoError::model(
                        file,
                        line,
                        ModelError::NotValueConcept(concept),
                    ));
                };
                let lit = Literal::parse_for(kind, &literal).ok_or_else(|| {
                    IoError::model(file, line, ModelError::ValueKindMismatch(kind, concept.clone()))
                })?;
                schema
                    .ensure_value(cid, lit)
                    .map_err(|e| IoError::model(file, line, e))?;
            }
            Tok::Word(w) if w == "item" => {
                let Some((Tok::Word(concept), _)) = lexer.next()? else {
                    return Err(IoError::parse(file, line, "expected concept name"));
                };
                let id = match lexer.next()? {
                    Some((Tok::Word(w), _)) => w,
                    Some((Tok::Str(s), _)) => s,
                    _ => return Err(IoError::parse(file, line, "expected item id")),
                };
                let Some((Tok::LBrace, _)) = lexer.next()? else {
                    return Err(IoError::parse(file, line, "expected `{`"));
                };
                let mut slots = Vec::new();
                let mut expect_dim = true;
                loop {
                    match lexer.next()? {
                        Some((Tok::RBrace, _)) => break,
                        Some((Tok::Comma, _)) => {
                            expect_dim = true;
                        }
                        Some((Tok::Word(dim), dline)) if expect_dim => {
                            let Some((Tok::Assign, _)) = lexer.next()? else {
                                return Err(IoError::parse(file, dline, "expected `=`"));
                            };
                            let value = match lexer.next()? {
                                Some((Tok::Word(w), _)) if w == "null" => SlotText::Null,
                                Some((Tok::Word(w), _)) => SlotText::Token(w),
                                Some((Tok::Str(s), _)) => SlotText::Token(s),
                                _ => return Err(IoError::parse(file, dline, "expected slot value")),
                            };
                            slots.push((dim, value));
                            expect_dim = false;
                        }
                        other => {
                            return Err(IoError::parse(
                                file,
                                line,
                                format!("unexpected token in item body: {other:?}"),
                            ))
                        }
                    }
                }
                items.push(ItemEntry {
                    concept,
                    id,
                    slots,
                    line,
                });
            }
            other => {
                return Err(IoError::parse(
                    file,
                    line,
                    format!("expected `item` or `value`, found {other:?}"),
                ))
            }
        }
    }

    // Group by concept, then insert in domains-first order so every
    // reference resolves after the full pass.
    let mut by_concept: HashMap<String, Vec<&ItemEntry>> = HashMap::new();
    for entry in &items {
        by_concept.entry(entry.concept.clone()).or_default().push(entry);
    }
    for (name, _) in by_concept.iter() {
        if schema.concept_by_name(name).is_none() {
            let line = items.iter().find(|i| &i.concept == name).map(|i| i.line).unwrap_or(0);
            return Err(IoError::model(
                file,
                line,
                ModelError::UnknownConcept(name.clone()),
            ));
        }
    }
    let order = concept_load_order(schema);
    for cid in order {
        let cname = schema.concept(cid).name.clone();
        let Some(entries) = by_concept.get(cname.as_str()) else {
            continue;
        };
        for entry in entries {
            let mut slots: Vec<(String, Option<ItemRef>)> = Vec::new();
            for (dim, value) in &entry.slots {
                let idx = schema
                    .concept(cid)
                    .dim_index(dim)
                    .ok_or_else(|| {
                        IoError::model(
                            file,
                            entry.line,
                            ModelError::UnknownDimension {
                                concept: cname.clone(),
                                dim: dim.clone(),
                            },
                        )
                    })?;
                let domain = schema.concept(cid).dims[idx].domain;
                let slot = match value {
                    SlotText::Null => None,
                    SlotText::Token(token) => Some(
                        schema
                            .resolve_slot(domain, token)
                            .map_err(|e| IoError::model(file, entry.line, e))?,
                    ),
                };
                slots.push((dim.clone(), slot));
            }
            let slots_ref: Vec<(&str, Option<ItemRef>)> =
                slots.iter().map(|(d, v)| (d.as_str(), *v)).collect();
            schema
                .add_item(cid, &entry.id, &slots_ref)
                .map_err(|e| IoError::model(file, entry.line, e))?;
        }
    }
    Ok(())
}

/// Concepts with their domains before them.
fn concept_load_order(schema: &Schema) -> Vec<ConceptId> {
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

/// Canonical data text: entries sorted by concept name then item id,
/// every dimension listed, `null` for absent slots.
pub fn render_data(schema: &Schema) -> String {
    let mut ids: Vec<_> = schema.concept_ids().collect();
    ids.sort_by(|a, b| schema.concept(*a).name.cmp(&schema.concept(*b).name));
    let mut out = String::new();
    for cid in ids {
        let c = schema.concept(cid);
        let mut items: Vec<ItemRef> = schema.items(cid).collect();
        items.sort_by(|a, b| schema.key_of(*a).cmp(schema.key_of(*b)));
        match c.kind {
            ConceptKind::Value(_) => {
                for item in items {
                    let lit = schema.value_of(item).expect("value item");
                    let rendered = match lit {
                        Literal::Str(s) => format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")),
                        other => other.canonical(),
                    };
                    out.push_str(&format!("value {} {}\n", c.name, rendered));
                }
            }
            ConceptKind::Entity => {
                for item in items {
                    out.push_str(&format!("item {} {} {{", c.name, render_token(schema.key_of(item))));
                    let slots = schema.slots_of(item);
                    for (i, d) in c.dims.iter().enumerate() {
                        if i > 0 {
                            out.push_str(" ,");
                        }
                        let value = match slots[i] {
                            None => "null".to_string(),
                            Some(r) => match schema.value_of(r) {
                                Some(Literal::Str(s)) => {
                                    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
                                }
                                Some(other) => other.canonical(),
                                None => render_token(schema.key_of(r)),
                            },
                        };
                        out.push_str(&format!(" {} = {}", d.name, value));
                    }
                    out.push_str(" }\n");
                }
            }
        }
    }
    out
}
