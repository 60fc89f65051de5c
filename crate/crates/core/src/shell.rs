//! The command shell binding the engine together: loading and saving
//! models, CSV import, queries, flattening, navigation, constraints,
//! propagation and inference. The same command set drives the
//! interactive REPL and batch scripts; batch output is deterministic.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::coql::{self, DerivedRegistry};
use crate::flatten::flatten;
use crate::io::{self, IngestMap};
use crate::model::{ConceptId, Schema};
use crate::navigate::{self, Collection};
use crate::oset::DimPath;
use crate::propagate::{
    check_consistency, infer, propagate_down, propagate_up, ConstraintKind, ConstraintSet,
    InferSource, InferTarget, Possibility,
};

/// Output format for query results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Aligned,
    Tsv,
    Json,
}

pub struct Shell {
    pub schema: Schema,
    pub registry: DerivedRegistry,
    pub constraints: ConstraintSet,
    /// Base directory for relative paths in commands.
    pub base: PathBuf,
    pub format: Format,
}

impl Default for Shell {
    fn default() -> Self {
        Shell::new()
    }
}

impl Shell {
    pub fn new() -> Self {
        Shell {
            schema: Schema::new("empty"),
            registry: DerivedRegistry::new(),
            constraints: ConstraintSet::new(ConstraintKind::QueryScoped),
            base: PathBuf::new(),
            format: Format::Aligned,
        }
    }

    pub fn with_schema(schema: Schema) -> Self {
        Shell {
            schema,
            ..Shell::new()
        }
    }

    fn resolve_path(&self, p: &str) -> PathBuf {
        let path = Path::new(p);
        if path.is_absolute() || self.base.as_os_str().is_empty() {
            path.to_path_buf()
        } else {
            self.base.join(path)
        }
    }

    fn concept(&self, name: &str) -> Result<ConceptId, String> {
        self.schema
            .concept_by_name(name)
            .ok_or_else(|| format!("unknown concept `{name}`"))
    }

    /// Execute one command line. Returns Ok(false) when the session
    /// should end, Err with a message on command failure.
    pub fn execute(&mut self, line: &str, out: &mut dyn Write) -> Result<bool, String> {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            return Ok(true);
        }
        let args = split_args(line)?;
        let (cmd, rest) = args.split_first().expect("nonempty");
        match cmd.as_str() {
            "quit" | "exit" => return Ok(false),
            "help" => {
                writeln!(
                    out,
                    "commands: load save import query flatten project deproject \
                     constrain propagate infer check stats help quit"
                )
                .map_err(|e| e.to_string())?;
            }
            "load" => {
                let (schema_path, data_path) = match rest {
                    [s] => (self.resolve_path(s), None),
                    [s, d] => (self.resolve_path(s), Some(self.resolve_path(d))),
                    _ => return Err("usage: load <schema-file> [<data-file>]".to_string()),
                };
                let schema =
                    io::load(&schema_path, data_path.as_deref()).map_err(|e| e.to_string())?;
                writeln!(
                    out,
                    "loaded {} concepts, {} items",
                    schema.concept_count(),
                    schema.total_items()
                )
                .map_err(|e| e.to_string())?;
                self.schema = schema;
                self.registry = DerivedRegistry::new();
                self.constraints = ConstraintSet::new(ConstraintKind::QueryScoped);
            }
            "save" => {
                let [schema_path, data_path] = rest else {
                    return Err("usage: save <schema-file> <data-file>".to_string());
                };
                io::save(
                    &self.schema,
                    &self.resolve_path(schema_path),
                    &self.resolve_path(data_path),
                )
                .map_err(|e| e.to_string())?;
                writeln!(out, "saved").map_err(|e| e.to_string())?;
            }
            "import" => {
                let [map_path] = rest else {
                    return Err("usage: import <map.toml>".to_string());
                };
                let map_path = self.resolve_path(map_path);
                let text = std::fs::read_to_string(&map_path)
                    .map_err(|e| format!("cannot read `{}`: {e}", map_path.display()))?;
                let map = IngestMap::parse_toml(&text).map_err(|e| e.to_string())?;
                let base = map_path.parent().unwrap_or(Path::new("")).to_path_buf();
                let report =
                    io::ingest_csv(&mut self.schema, &map, &base).map_err(|e| e.to_string())?;
                write!(out, "{report}").map_err(|e| e.to_string())?;
            }
            "query" => {
                let (format, text) = take_format(rest, self.format)?;
                if text.is_empty() {
                    return Err("usage: query [--tsv|--json] <coql text>".to_string());
                }
                let constraints = if self.constraints.is_empty() {
                    None
                } else {
                    Some(&self.constraints)
                };
                let table = coql::run_query(&self.schema, &self.registry, constraints, &text)
                    .map_err(|e| e.to_string())?;
                let rendered = match format {
                    Format::Aligned => table.to_aligned(&self.schema),
                    Format::Tsv => table.to_tsv(&self.schema),
                    Format::Json => table.to_json_lines(&self.schema),
                };
                write!(out, "{rendered}").map_err(|e| e.to_string())?;
            }
            "flatten" => {
                let mut tsv = false;
                let mut bottom: Option<String> = None;
                let mut it = rest.iter();
                while let Some(arg) = it.next() {
                    match arg.as_str() {
                        "--tsv" => tsv = true,
                        "--bottom" => {
                            bottom = Some(
                                it.next()
                                    .ok_or("--bottom needs a concept name")?
                                    .to_string(),
                            )
                        }
                        other => return Err(format!("unknown flag `{other}`")),
                    }
                }
                let bottom = match bottom {
                    Some(name) => self.concept(&name)?,
                    None => self.schema.bottom().map_err(|e| e.to_string())?,
                };
                let table = flatten(&self.schema, bottom);
                if tsv {
                    write!(out, "{}", table.to_tsv(&self.schema)).map_err(|e| e.to_string())?;
                } else {
                    let tsv_text = table.to_tsv(&self.schema);
                    for line in tsv_text.lines() {
                        writeln!(out, "{}", line.replace('\t', "  ")).map_err(|e| e.to_string())?;
                    }
                }
                if !table.duplicates.is_empty() {
                    writeln!(out, "warning: {} duplicate slot vectors", table.duplicates.len())
                        .map_err(|e| e.to_string())?;
                }
                for skipped in &table.skipped {
                    writeln!(
                        out,
                        "warning: concept {} not reachable from bottom, skipped",
                        self.schema.concept(*skipped).name
                    )
                    .map_err(|e| e.to_string())?;
                }
            }
            "project" => {
                let [concept, path] = rest else {
                    return Err("usage: project <Concept> <dim[.dim...]>".to_string());
                };
                let cid = self.concept(concept)?;
                let coll = Collection::of_concept(&self.schema, cid);
                let result = navigate::project(&self.schema, &coll, &DimPath::parse(path))
                    .map_err(|e| e.to_string())?;
                for item in &result.members {
                    writeln!(out, "{}", self.schema.key_of(*item)).map_err(|e| e.to_string())?;
                }
            }
            "deproject" => {
                let [concept, dims, target] = rest else {
                    return Err("usage: deproject <Concept> <dim[.dim...]> <Target>".to_string());
                };
                let cid = self.concept(concept)?;
                let tid = self.concept(target)?;
                let coll = Collection::of_concept(&self.schema, cid);
                let target_coll = Collection::of_concept(&self.schema, tid);
                let labels = DimPath::parse(dims);
                let result =
                    navigate::deproject_chain(&self.schema, &coll, &labels.0, &target_coll)
                        .map_err(|e| e.to_string())?;
                for item in &result.members {
                    writeln!(out, "{}", self.schema.key_of(*item)).map_err(|e| e.to_string())?;
                }
            }
            "constrain" => {
                let [concept, expr_parts @ ..] = rest else {
                    return Err("usage: constrain <Concept> <expression>".to_string());
                };
                if expr_parts.is_empty() {
                    return Err("usage: constrain <Concept> <expression>".to_string());
                }
                let cid = self.concept(concept)?;
                let text = expr_parts.join(" ");
                let expr = coql::parse_expr_text(&text).map_err(|e| e.to_string())?;
                let possibility =
                    coql::local_possibility(&self.schema, &self.registry, cid, &expr)
                        .map_err(|e| e.to_string())?;
                let possible = possibility.possible_count();
                self.constraints.impose(&self.schema, possibility);
                writeln!(
                    out,
                    "{}: {} of {} items possible",
                    concept,
                    possible,
                    self.schema.item_count(cid)
                )
                .map_err(|e| e.to_string())?;
            }
            "propagate" => {
                let direction = match rest {
                    [d] => d.as_str(),
                    _ => return Err("usage: propagate --down|--up".to_string()),
                };
                match direction {
                    "--down" => {
                        self.constraints = propagate_down(&self.schema, &self.constraints, None)
                    }
                    "--up" => self.constraints = propagate_up(&self.schema, &self.constraints),
                    other => return Err(format!("unknown direction `{other}`")),
                }
                for cid in self.constraints.concepts().collect::<Vec<_>>() {
                    let p = self.constraints.possibility(cid).expect("listed");
                    writeln!(
                        out,
                        "{}: {} of {} items possible",
                        self.schema.concept(cid).name,
                        p.possible_count(),
                        self.schema.item_count(cid)
                    )
                    .map_err(|e| e.to_string())?;
                }
            }
            "infer" => {
                let mut sources: Vec<(String, String)> = Vec::new();
                let mut via: Option<String> = None;
                let mut to: Option<(String, String)> = None;
                let mut it = rest.iter();
                while let Some(arg) = it.next() {
                    match arg.as_str() {
                        "--from" => {
                            let spec = it.next().ok_or("--from needs Concept:path")?;
                            sources.push(parse_concept_path(spec)?);
                        }
                        "--via" => via = Some(it.next().ok_or("--via needs a concept")?.to_string()),
                        "--to" => {
                            let spec = it.next().ok_or("--to needs Concept:path")?;
                            to = Some(parse_concept_path(spec)?);
                        }
                        other => return Err(format!("unknown flag `{other}`")),
                    }
                }
                let Some((target_name, target_path)) = to else {
                    return Err("usage: infer --from C:path ... --via Bottom --to C:path".to_string());
                };
                let bottom = match via {
                    Some(name) => self.concept(&name)?,
                    None => self.schema.bottom().map_err(|e| e.to_string())?,
                };
                let mut infer_sources = Vec::new();
                for (name, path) in sources {
                    let cid = self.concept(&name)?;
                    let possibility = match self.constraints.possibility(cid) {
                        Some(p) => p.clone(),
                        None => Possibility::all(&self.schema, cid),
                    };
                    infer_sources.push(InferSource {
                        concept: cid,
                        possibility,
                        path: DimPath::parse(&path),
                    });
                }
                let target = InferTarget {
                    concept: self.concept(&target_name)?,
                    path: DimPath::parse(&target_path),
                };
                let result = infer(&self.schema, &infer_sources, bottom, &target)
                    .map_err(|e| e.to_string())?;
                for item in result.possible_items() {
                    writeln!(out, "{}", self.schema.key_of(item)).map_err(|e| e.to_string())?;
                }
            }
            "check" => {
                let ok = check_consistency(&self.schema, &self.constraints);
                if ok {
                    writeln!(out, "consistent").map_err(|e| e.to_string())?;
                } else {
                    let mut prohibited = 0usize;
                    for cid in self.constraints.concepts().collect::<Vec<_>>() {
                        let p = self.constraints.possibility(cid).expect("listed");
                        prohibited += self
                            .schema
                            .items(cid)
                            .filter(|i| !p.is_possible(*i))
                            .count();
                    }
                    writeln!(out, "inconsistent: {prohibited} stored items prohibited")
                        .map_err(|e| e.to_string())?;
                    return Err("consistency check failed".to_string());
                }
            }
            "stats" => match rest {
                [] => {
                    let mut ids: Vec<_> = self.schema.concept_ids().collect();
                    ids.sort_by(|a, b| {
                        self.schema.concept(*a).name.cmp(&self.schema.concept(*b).name)
                    });
                    for cid in ids {
                        let c = self.schema.concept(cid);
                        let kind = match c.kind {
                            crate::model::ConceptKind::Entity => "entity".to_string(),
                            crate::model::ConceptKind::Value(k) => format!("value {k}"),
                        };
                        writeln!(
                            out,
                            "{}: {} concept, {} dimensions, {} items",
                            c.name,
                            kind,
                            c.dims.len(),
                            self.schema.item_count(cid)
                        )
                        .map_err(|e| e.to_string())?;
                    }
                }
                [name] => {
                    let cid = self.concept(name)?;
                    let c = self.schema.concept(cid);
                    let oset = self.schema.concept_oset();
                    let el = oset.lookup(&c.name).expect("concept in order");
                    let metrics = oset.metrics(el).map_err(|e| e.to_string())?;
                    writeln!(out, "{}: {} items", c.name, self.schema.item_count(cid))
                        .map_err(|e| e.to_string())?;
                    writeln!(out, "  dimensionality: {}", metrics.dimensionality)
                        .map_err(|e| e.to_string())?;
                    writeln!(out, "  cardinality: {}", metrics.cardinality)
                        .map_err(|e| e.to_string())?;
                    writeln!(
                        out,
                        "  primitive dimensionality: {}",
                        metrics.primitive_dimensionality
                    )
                    .map_err(|e| e.to_string())?;
                    writeln!(
                        out,
                        "  primitive cardinality: {}",
                        metrics.primitive_cardinality
                    )
                    .map_err(|e| e.to_string())?;
                }
                _ => return Err("usage: stats [Concept]".to_string()),
            },
            other => return Err(format!("unknown command `{other}` (try `help`)")),
        }
        Ok(true)
    }

    /// Evaluate one query text directly (the `--query` CLI path), using
    /// the shell's current format and constraint set.
    pub fn run_query_text(&mut self, text: &str, out: &mut dyn Write) -> Result<(), String> {
        let constraints = if self.constraints.is_empty() {
            None
        } else {
            Some(&self.constraints)
        };
        let table = coql::run_query(&self.schema, &self.registry, constraints, text)
            .map_err(|e| e.to_string())?;
        let rendered = match self.format {
            Format::Aligned => table.to_aligned(&self.schema),
            Format::Tsv => table.to_tsv(&self.schema),
            Format::Json => table.to_json_lines(&self.schema),
        };
        write!(out, "{rendered}").map_err(|e| e.to_string())
    }

    /// Run a batch script: one command per line, errors reported to
    /// `err`, execution continues. Returns the number of failed commands.
    pub fn run_script(&mut self, script: &str, out: &mut dyn Write, err: &mut dyn Write) -> usize {
        let mut failures = 0usize;
        for line in script.lines() {
            match self.execute(line, out) {
                Ok(true) => {}
                Ok(false) => break,
                Err(message) => {
                    failures += 1;
                    let _ = writeln!(err, "error: {message}");
                }
            }
        }
        failures
    }
}

fn parse_concept_path(spec: &str) -> Result<(String, String), String> {
    match spec.split_once(':') {
        Some((concept, path)) if !concept.is_empty() => {
            Ok((concept.to_string(), path.to_string()))
        }
        _ => Err(format!("expected Concept:path, got `{spec}`")),
    }
}

fn take_format(args: &[String], default: Format) -> Result<(Format, String), String> {
    let mut format = default;
    let mut rest = Vec::new();
    for arg in args {
        match arg.as_str() {
            "--tsv" => format = Format::Tsv,
            "--json" => format = Format::Json,
            "--aligned" => format = Format::Aligned,
            other => rest.push(other.to_string()),
        }
    }
    Ok((format, rest.join(" ")))
}

/// Split a command line into arguments; single or double quotes group
/// words and are stripped.
fn split_args(line: &str) -> Result<Vec<String>, String> {
    let mut args = Vec::new();
    let mut current = String::new();
    let mut quote: Option<char> = None;
    let mut has_current = false;
    for c in line.chars() {
        match quote {
            Some(q) => {
                if c == q {
                    quote = None;
                } else {
                    current.push(c);
                }
            }
            None => match c {
                '\'' | '"' => {
                    quote = Some(c);
                    has_current = true;
                }
                c if c.is_whitespace() => {
                    if has_current || !current.is_empty() {
                        args.push(std::mem::take(&mut current));
                        has_current = false;
                    }
                }
                other => {
                    current.push(other);
                    has_current = true;
                }
            },
        }
    }
    if quote.is_some() {
        return Err("unbalanced quote in command".to_string());
    }
    if has_current || !current.is_empty() {
        args.push(current);
    }
    Ok(args)
}
