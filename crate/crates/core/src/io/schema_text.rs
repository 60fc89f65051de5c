//! The schema text format:
//!
//! ```text
//! concept Ages value int { }
//! concept Employees { name : Names ; age : Ages ; }
//! bottom OrderParts ;
//! ```
//!
//! Forward references are resolved in a second pass, so concepts may be
//! written in any order; the canonical form sorts them by name.

use crate::model::{ConceptKind, ModelError, Schema};
use crate::value::ValueKind;

use super::IoError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Str(String),
    Colon,
    Semi,
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
                ':' => {
                    self.pos += 1;
                    Tok::Colon
                }
                ';' => {
                    self.pos += 1;
                    Tok::Semi
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
struct ConceptDecl {
    name: String,
    kind: ConceptKind,
    dims: Vec<(String, String)>,
    line: u32,
}

pub fn parse_schema(file: &str, text: &str) -> Result<Schema, IoError> {
    let mut lexer = Lexer::new(file, text);
    let mut decls: Vec<ConceptDecl> = Vec::new();
    let mut bottom: Option<(String, u32)> = None;

    let mut next = lexer.next()?;
    while let Some((tok, line)) = next.take() {
        match tok {
            Tok::Word(w) if w == "concept" => {
                let Some((Tok::Word(name), _)) = lexer.next()? else {
                    return Err(IoError::parse(file, line, "expected concept name"));
                };
                let mut kind = ConceptKind::Entity;
                let mut after = lexer.next()?;
                if let Some((Tok::Word(w), vline)) = &after {
                    if w == "value" {
                        let Some((Tok::Word(ty), tline)) = lexer.next()? else {
                            return Err(IoError::parse(file, *vline, "expected value type"));
                        };
                        let vk = ValueKind::parse_name(&ty).ok_or_else(|| {
                            IoError::parse(file, tline, format!("unknown value type `{ty}`"))
                        })?;
                        kind = ConceptKind::Value(vk);
                        after = lexer.next()?;
                    }
                }
                let Some((Tok::LBrace, _)) = after else {
                    return Err(IoError::parse(file, line, "expected `{` after concept head"));
                };
                let mut dims = Vec::new();
                loop {
                    match lexer.next()? {
                        Some((Tok::RBrace, _)) => break,
                        Some((Tok::Word(dim), dline)) => {
                            let Some((Tok::Colon, _)) = lexer.next()? else {
                                return Err(IoError::parse(file, dline, "expected `:` after dimension name"));
                            };
                            let Some((Tok::Word(domain), _)) = lexer.next()? else {
                                return Err(IoError::parse(file, dline, "expected domain concept"));
                            };
                            let Some((Tok::Semi, _)) = lexer.next()? else {
                                return Err(IoError::parse(file, dline, "expected `;` after dimension"));
                            };
                            dims.push((dim, domain));
                        }
                        other => {
                            return Err(IoError::parse(
                                file,
                                line,
                                format!("unexpected token in concept body: {other:?}"),
                            ))
                        }
                    }
                }
                decls.push(ConceptDecl {
                    name,
                    kind,
                    dims,
                    line,
                });
            }
            Tok::Word(w) if w == "bottom" => {
                let Some((Tok::Word(name), _)) = lexer.next()? else {
                    return Err(IoError::parse(file, line, "expected bottom concept name"));
                };
                let Some((Tok::Semi, _)) = lexer.next()? else {
                    return Err(IoError::parse(file, line, "expected `;` after bottom"));
                };
                bottom = Some((name, line));
            }
            other => {
                return Err(IoError::parse(
                    file,
                    line,
                    format!("expected `concept` or `bottom`, found {other:?}"),
                ))
            }
        }
        next = lexer.next()?;
    }

    // Two-phase resolution: order declarations so domains come first.
    let mut schema = Schema::new("");
    let mut remaining: Vec<&ConceptDecl> = decls.iter().collect();
    while !remaining.is_empty() {
        let ready: Vec<usize> = remaining
            .iter()
            .enumerate()
            .filter(|(_, d)| {
                d.dims
                    .iter()
                    .all(|(_, domain)| schema.concept_by_name(domain).is_some())
            })
            .map(|(i, _)| i)
            .collect();
        if ready.is_empty() {
            // a cycle or a truly unknown domain; report precisely
            let stuck = remaining[0];
            for (dim, domain) in &stuck.dims {
                let _ = dim;
                if !decls.iter().any(|d| &d.name == domain) {
                    return Err(IoError::model(
                        file,
                        stuck.line,
                        ModelError::UnknownDomain(domain.clone()),
                    ));
                }
            }
            return Err(IoError::model(
                file,
                stuck.line,
                ModelError::CycleDetected(stuck.name.clone()),
            ));
        }
        for &offset in &ready {
            let decl = remaining[offset];
            let dims: Vec<(&str, &str)> = decl
                .dims
                .iter()
                .map(|(a, b)| (a.as_str(), b.as_str()))
                .collect();
            schema
                .define_concept(&decl.name, decl.kind, &dims)
                .map_err(|e| IoError::model(file, decl.line, e))?;
        }
        for offset in ready.into_iter().rev() {
            remaining.remove(offset);
        }
    }

    if let Some((name, line)) = bottom {
        let id = schema
            .concept_by_name(&name)
            .ok_or_else(|| IoError::model(file, line, ModelError::UnknownConcept(name)))?;
        schema.set_bottom(id);
    }
    Ok(schema)
}

/// Canonical schema text: concepts sorted by name, dimensions in
/// declaration order, an explicit bottom directive when designated.
pub fn render_schema(schema: &Schema) -> String {
    let mut ids: Vec<_> = schema.concept_ids().collect();
    ids.sort_by(|a, b| schema.concept(*a).name.cmp(&schema.concept(*b).name));
    let mut out = String::new();
    for id in ids {
        let c = schema.concept(id);
        match c.kind {
            ConceptKind::Value(kind) => {
                out.push_str(&format!("concept {} value {} {{ }}\n", c.name, kind.name()));
            }
            ConceptKind::Entity => {
                out.push_str(&format!("concept {} {{", c.name));
                for d in &c.dims {
                    out.push_str(&format!(" {} : {} ;", d.name, schema.concept(d.domain).name));
                }
                out.push_str(" }\n");
            }
        }
    }
    if let Some(bottom) = schema.explicit_bottom() {
        out.push_str(&format!("bottom {} ;\n", schema.concept(bottom).name));
    }
    out
}
