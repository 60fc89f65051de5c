//! Shared helpers for the integration suites: the COQL corpus with its
//! independent nested-loop oracles, plus small item-store accessors.
#![allow(dead_code)]

use comdb::coql::{self, DerivedRegistry};
use comdb::model::{ConceptId, ItemRef, Schema};
use comdb::value::Literal;
use comdb::fixtures;
use rust_decimal::Decimal;

pub fn key(s: &Schema, item: ItemRef) -> String {
    s.key_of(item).to_string()
}

pub fn slot(s: &Schema, item: ItemRef, dim: &str) -> Option<ItemRef> {
    s.get_slot(item, dim).unwrap()
}

pub fn slot_str(s: &Schema, item: ItemRef, dim: &str) -> String {
    let r = slot(s, item, dim).unwrap();
    match s.value_of(r) {
        Some(lit) => lit.canonical(),
        None => s.key_of(r).to_string(),
    }
}

pub fn slot_int(s: &Schema, item: ItemRef, dim: &str) -> i64 {
    match s.value_of(slot(s, item, dim).unwrap()) {
        Some(Literal::Int(v)) => *v,
        other => panic!("expected int slot, got {other:?}"),
    }
}

pub fn slot_dec(s: &Schema, item: ItemRef, dim: &str) -> Decimal {
    match s.value_of(slot(s, item, dim).unwrap()) {
        Some(Literal::Dec(d)) => *d,
        Some(Literal::Int(v)) => Decimal::from(*v),
        other => panic!("expected decimal slot, got {other:?}"),
    }
}

pub fn items(s: &Schema, concept: &str) -> Vec<ItemRef> {
    s.items(s.concept_by_name(concept).unwrap()).collect()
}

pub fn concept(s: &Schema, name: &str) -> ConceptId {
    s.concept_by_name(name).unwrap()
}

/// Sort helper: multiset of tab-joined row texts.
pub fn rows(rows: Vec<Vec<String>>) -> Vec<String> {
    let mut out: Vec<String> = rows.into_iter().map(|r| r.join("\t")).collect();
    out.sort();
    out
}

/// The group1 registry with the derived properties used by the corpus.
pub fn group1_registry(s: &Schema) -> DerivedRegistry {
    let mut registry = DerivedRegistry::new();
    let orders =
        coql::parse_property("Employees::orders() { RETURN this <- employee <- Orders; }").unwrap();
    coql::register_derived(&mut registry, s, &orders).unwrap();
    let orders_in = coql::parse_property(
        "Employees::orders(Categories c) { \
         RETURN this <- employee <- (Orders o | \
         COUNT(o <- order <- (OrderParts p | p.dish.category == c)) > 0); }",
    )
    .unwrap();
    coql::register_derived(&mut registry, s, &orders_in).unwrap();
    registry
}

pub struct CorpusEntry {
    pub name: &'static str,
    pub fixture: &'static str,
    pub query: &'static str,
    pub oracle: fn(&Schema) -> Vec<String>,
}

pub fn fixture_by_name(name: &str) -> Schema {
    match name {
        "group1" => fixtures::group1(),
        "olap1" => fixtures::olap1(),
        "proj1" => fixtures::proj1(),
        other => panic!("unknown fixture {other}"),
    }
}

// --------------------------------------------------------------------
// group1 oracle helpers

fn g_employee_of_order(s: &Schema, order: ItemRef) -> ItemRef {
    slot(s, order, "employee").unwrap()
}

fn g_parts_of_order(s: &Schema, order: ItemRef) -> Vec<ItemRef> {
    items(s, "OrderParts")
        .into_iter()
        .filter(|p| slot(s, *p, "order") == Some(order))
        .collect()
}

fn g_orders_of_employee(s: &Schema, e: ItemRef) -> Vec<ItemRef> {
    items(s, "Orders")
        .into_iter()
        .filter(|o| slot(s, *o, "employee") == Some(e))
        .collect()
}

fn g_pizza_2006_parts(s: &Schema, e: ItemRef) -> Vec<ItemRef> {
    let mut group = Vec::new();
    for o in g_orders_of_employee(s, e) {
        if slot_str(s, o, "date") != "2006" {
            continue;
        }
        for p in g_parts_of_order(s, o) {
            let dish = slot(s, p, "dish").unwrap();
            if slot_str(s, dish, "category") == "pizza" {
                group.push(p);
            }
        }
    }
    group
}

fn g_total(s: &Schema, parts: &[ItemRef]) -> Decimal {
    parts
        .iter()
        .map(|&p| {
            let dish = slot(s, p, "dish").unwrap();
            Decimal::from(slot_int(s, p, "count")) * slot_dec(s, dish, "price")
        })
        .sum()
}

// --------------------------------------------------------------------
// the corpus

pub fn corpus() -> Vec<CorpusEntry> {
    vec![
        CorpusEntry {
            name: "select star",
            fixture: "group1",
            query: "SELECT * FROM Employees",
            oracle: |s| {
                rows(
                    items(s, "Employees")
                        .into_iter()
                        .map(|e| vec![slot_str(s, e, "name"), slot_int(s, e, "age").to_string()])
                        .collect(),
                )
            },
        },
        CorpusEntry {
            name: "from-first star",
            fixture: "group1",
            query: "FROM Employees SELECT *",
            oracle: |s| {
                rows(
                    items(s, "Employees")
                        .into_iter()
                        .map(|e| vec![slot_str(s, e, "name"), slot_int(s, e, "age").to_string()])
                        .collect(),
                )
            },
        },
        CorpusEntry {
            name: "average subquery",
            fixture: "group1",
            query: "AVERAGE( SELECT age FROM Employees )",
            oracle: |s| {
                let ages: Vec<i64> = items(s, "Employees")
                    .into_iter()
                    .map(|e| slot_int(s, e, "age"))
                    .collect();
                let sum: i64 = ages.iter().sum();
                let avg = Decimal::from(sum) / Decimal::from(ages.len() as i64);
                vec![avg.to_string()]
            },
        },
        CorpusEntry {
            name: "nested subquery with filter",
            fixture: "group1",
            query: "SELECT * FROM (SELECT * FROM Employees) WHERE age > 30",
            oracle: |s| {
                rows(
                    items(s, "Employees")
                        .into_iter()
                        .filter(|e| slot_int(s, *e, "age") > 30)
                        .map(|e| vec![slot_str(s, e, "name"), slot_int(s, e, "age").to_string()])
                        .collect(),
                )
            },
        },
        CorpusEntry {
            name: "filter without variable",
            fixture: "group1",
            query: "FROM (Employees | age == 30) SELECT *",
            oracle: |s| {
                rows(
                    items(s, "Employees")
                        .into_iter()
                        .filter(|e| slot_int(s, *e, "age") == 30)
                        .map(|e| vec![slot_str(s, e, "name"), slot_int(s, e, "age").to_string()])
                        .collect(),
                )
            },
        },
        CorpusEntry {
            name: "filter with variable",
            fixture: "group1",
            query: "FROM (Employees emp | emp.age == 30) SELECT name",
            oracle: |s| {
                rows(
                    items(s, "Employees")
                        .into_iter()
                        .filter(|e| slot_int(s, *e, "age") == 30)
                        .map(|e| vec![slot_str(s, e, "name")])
                        .collect(),
                )
            },
        },
        CorpusEntry {
            name: "filter with aggregated deprojection",
            fixture: "group1",
            query: "FROM (Employees e | COUNT( e <- employee <- Orders ) > 5) SELECT name",
            oracle: |s| {
                rows(
                    items(s, "Employees")
                        .into_iter()
                        .filter(|e| g_orders_of_employee(s, *e).len() > 5)
                        .map(|e| vec![slot_str(s, e, "name")])
                        .collect(),
                )
            },
        },
        CorpusEntry {
            name: "cartesian product",
            fixture: "proj1",
            query: "FROM ( Projects project, Personnel person ) SELECT ( project.name, person.name )",
            oracle: |s| {
                let mut out = Vec::new();
                for p in items(s, "Projects") {
                    for q in items(s, "Personnel") {
                        out.push(vec![slot_str(s, p, "name"), slot_str(s, q, "name")]);
                    }
                }
                rows(out)
            },
        },
        CorpusEntry {
            name: "cartesian where",
            fixture: "proj1",
            query: "FROM ( Projects project, Personnel person ) \
                    WHERE ( person.age > 30 AND project.budget < 20 ) \
                    SELECT ( project.name, person.name )",
            oracle: proj1_where_oracle,
        },
        CorpusEntry {
            name: "imperative forall",
            fixture: "proj1",
            query: "FORALL ( Projects project, Personnel person ) { \
                    IF ( person.age > 30 AND project.budget < 20 ) \
                    RETURN (project.name, person.name ); }",
            oracle: proj1_where_oracle,
        },
        CorpusEntry {
            name: "projection in from",
            fixture: "olap1",
            query: "FROM (Customers -> country) c SELECT c.code",
            oracle: |s| {
                let mut seen = Vec::new();
                for cust in items(s, "Customers") {
                    if let Some(country) = slot(s, cust, "country") {
                        if !seen.contains(&country) {
                            seen.push(country);
                        }
                    }
                }
                rows(seen.into_iter().map(|c| vec![slot_str(s, c, "code")]).collect())
            },
        },
        CorpusEntry {
            name: "deprojection in from",
            fixture: "olap1",
            query: "FROM ((Countries | code == 'DE') <- country <- Customers) cu SELECT cu.name",
            oracle: |s| {
                rows(
                    items(s, "Customers")
                        .into_iter()
                        .filter(|cu| {
                            slot(s, *cu, "country")
                                .map(|c| slot_str(s, c, "code") == "DE")
                                .unwrap_or(false)
                        })
                        .map(|cu| vec![slot_str(s, cu, "name")])
                        .collect(),
                )
            },
        },
        CorpusEntry {
            name: "derived property",
            fixture: "group1",
            query: "FROM Employees e WHERE COUNT(e.orders()) > 5 SELECT e.name",
            oracle: |s| {
                rows(
                    items(s, "Employees")
                        .into_iter()
                        .filter(|e| g_orders_of_employee(s, *e).len() > 5)
                        .map(|e| vec![slot_str(s, e, "name")])
                        .collect(),
                )
            },
        },
        CorpusEntry {
            name: "derived property with parameter",
            fixture: "group1",
            query: "FROM Employees e SELECT e.name, COUNT(e.orders('pizza')) AS pizza",
            oracle: |s| {
                rows(
                    items(s, "Employees")
                        .into_iter()
                        .map(|e| {
                            let n = g_orders_of_employee(s, e)
                                .into_iter()
                                .filter(|&o| {
                                    g_parts_of_order(s, o).into_iter().any(|p| {
                                        let dish = slot(s, p, "dish").unwrap();
                                        slot_str(s, dish, "category") == "pizza"
                                    })
                                })
                                .count();
                            vec![slot_str(s, e, "name"), n.to_string()]
                        })
                        .collect(),
                )
            },
        },
        CorpusEntry {
            name: "pizza count (single filter)",
            fixture: "group1",
            query: "FROM Employees e \
                    WHERE COUNT( \
                      e <- employee <- order <- (OrderParts \
                        | order.date == '2006' AND dish.category == 'pizza') \
                    ) > 3 \
                    SELECT e.name",
            oracle: pizza_oracle,
        },
        CorpusEntry {
            name: "pizza count (chained filters)",
            fixture: "group1",
            query: "FROM Employees e \
                    WHERE COUNT( \
                      e <- employee <- (Orders | date == '2006') \
                        <- order <- (OrderParts | dish.category == 'pizza') \
                    ) > 3 \
                    SELECT e.name",
            oracle: pizza_oracle,
        },
        CorpusEntry {
            name: "pizza total in body",
            fixture: "group1",
            query: "FROM Employees e \
                    { \
                      Collection group = e <- employee <- order <- (OrderParts \
                        | order.date == '2006' AND dish.category == 'pizza'); \
                      double total = SUM( group.<count * dish.price> ); \
                    } \
                    WHERE COUNT( group ) > 3 AND total < 200 \
                    SELECT e.name, total",
            oracle: pizza_total_oracle,
        },
        CorpusEntry {
            name: "pizza total imperative",
            fixture: "group1",
            query: "FORALL Employees e \
                    { \
                      Collection group = e <- employee <- order <- (OrderParts \
                        | order.date == '2006' AND dish.category == 'pizza'); \
                      double total = SUM( group.<count * dish.price> ); \
                      IF( COUNT( group ) > 3 AND total < 200 ) \
                      THEN RETURN( e.name, total ); \
                    }",
            oracle: pizza_total_oracle,
        },
        CorpusEntry {
            name: "pizza total verbose subquery",
            fixture: "group1",
            query: "FROM Employees e \
                    { \
                      Collection group = \
                        (FROM OrderParts op \
                        WHERE \
                          op.order.date == '2006' AND \
                          op.dish.category == 'pizza' AND \
                          op.order.employee == e \
                        SELECT op.count * op.dish.price); \
                    } \
                    WHERE COUNT( group ) > 3 AND SUM( group ) < 200 \
                    SELECT e.name, SUM( group ) AS total",
            oracle: pizza_total_oracle,
        },
        CorpusEntry {
            name: "two groups",
            fixture: "group1",
            query: "FROM Employees e \
                    { \
                      Collection group = \
                        e <- employee <- order <- (OrderParts \
                          | order.date == '2006' AND dish.category == 'pizza'); \
                      Collection group2 = \
                        e <- employee <- (Orders | date == '2007'); \
                    } \
                    WHERE COUNT( group ) > 3 AND COUNT( group2 ) > 1 \
                    SELECT e.name",
            oracle: |s| {
                rows(
                    items(s, "Employees")
                        .into_iter()
                        .filter(|&e| {
                            let pizzas = g_pizza_2006_parts(s, e).len();
                            let orders07 = g_orders_of_employee(s, e)
                                .into_iter()
                                .filter(|&o| slot_str(s, o, "date") == "2007")
                                .count();
                            pizzas > 3 && orders07 > 1
                        })
                        .map(|e| vec![slot_str(s, e, "name")])
                        .collect(),
                )
            },
        },
        CorpusEntry {
            name: "zigzag shared categories",
            fixture: "group1",
            query: "FROM Employees e \
                    { \
                      Collection group = \
                        e <- employee <- order \
                        <- (OrderParts | order.date == '2006') \
                        -> dish -> category \
                        <- category <- dish \
                        <- (OrderParts | order.date == '2007') \
                        -> order -> employee; \
                    } \
                    WHERE COUNT( group ) > 10 \
                    SELECT e.name",
            oracle: |s| {
                rows(
                    items(s, "Employees")
                        .into_iter()
                        .filter(|&e| zigzag_group(s, e).len() > 10)
                        .map(|e| vec![slot_str(s, e, "name")])
                        .collect(),
                )
            },
        },
        CorpusEntry {
            name: "popular year fragment",
            fixture: "group1",
            query: "FROM (OrderParts op | COUNT(op.order.date <- date <- Orders) > 30) p SELECT p",
            oracle: |s| {
                rows(
                    items(s, "OrderParts")
                        .into_iter()
                        .filter(|&p| {
                            let order = slot(s, p, "order").unwrap();
                            let date = slot(s, order, "date").unwrap();
                            let year_orders = items(s, "Orders")
                                .into_iter()
                                .filter(|&o| slot(s, o, "date") == Some(date))
                                .count();
                            year_orders > 30
                        })
                        .map(|p| vec![key(s, p)])
                        .collect(),
                )
            },
        },
        CorpusEntry {
            name: "olap bracket grouping",
            fixture: "olap1",
            query: "FROM (Countries cntr, Categories ctgr) \
                    { \
                      Collection grp = [ \
                        cntr <- country <- customer <- order <- OrderParts \
                        AND ctgr <- category <- product <- OrderParts \
                      ]; \
                      double total = SUM ( grp.price ); \
                      integer cnt = COUNT ( grp -> order ); \
                    } \
                    WHERE COUNT(cntr <- country <- Customers) > 0 \
                    SELECT cntr.code, ctgr.id, total, cnt",
            oracle: olap_cells_oracle,
        },
        CorpusEntry {
            name: "olap manual grouping",
            fixture: "olap1",
            query: "FROM (Countries cntr, Categories ctgr) \
                    { \
                      Collection grp = \
                        (FROM OrderParts op \
                        WHERE op -> order -> customer -> country == cntr \
                              AND op -> product -> category == ctgr \
                        SELECT op); \
                      double total = SUM ( grp.price ); \
                      integer cnt = COUNT ( grp -> order ); \
                    } \
                    WHERE COUNT(cntr <- country <- Customers) > 0 \
                    SELECT cntr.code, ctgr.id, total, cnt",
            oracle: olap_cells_oracle,
        },
        CorpusEntry {
            name: "count shortcut",
            fixture: "olap1",
            query: "FROM (Countries cntr, Categories ctgr) \
                    WHERE ( cntr <- country <- Customers > 0 ) \
                    SELECT cntr.code, ctgr.id",
            oracle: |s| {
                let mut out = Vec::new();
                for cntr in items(s, "Countries") {
                    let has_customer = items(s, "Customers")
                        .into_iter()
                        .any(|cu| slot(s, cu, "country") == Some(cntr));
                    if !has_customer {
                        continue;
                    }
                    for ctgr in items(s, "Categories") {
                        out.push(vec![slot_str(s, cntr, "code"), slot_str(s, ctgr, "id")]);
                    }
                }
                rows(out)
            },
        },
        CorpusEntry {
            name: "imperative item declaration",
            fixture: "group1",
            query: "FORALL Employees e { Item n = e.name; RETURN (n); }",
            oracle: |s| {
                rows(
                    items(s, "Employees")
                        .into_iter()
                        .map(|e| vec![slot_str(s, e, "name")])
                        .collect(),
                )
            },
        },
        CorpusEntry {
            name: "typed collection declaration",
            fixture: "group1",
            query: "FROM Employees e { Collection<Orders> mine = e <- employee <- Orders; } \
                    WHERE COUNT(mine) > 5 SELECT e.name",
            oracle: |s| {
                rows(
                    items(s, "Employees")
                        .into_iter()
                        .filter(|e| g_orders_of_employee(s, *e).len() > 5)
                        .map(|e| vec![slot_str(s, e, "name")])
                        .collect(),
                )
            },
        },
    ]
}

fn proj1_where_oracle(s: &Schema) -> Vec<String> {
    let mut out = Vec::new();
    for p in items(s, "Projects") {
        for q in items(s, "Personnel") {
            if slot_int(s, q, "age") > 30 && slot_int(s, p, "budget") < 20 {
                out.push(vec![slot_str(s, p, "name"), slot_str(s, q, "name")]);
            }
        }
    }
    rows(out)
}

fn pizza_oracle(s: &Schema) -> Vec<String> {
    rows(
        items(s, "Employees")
            .into_iter()
            .filter(|&e| g_pizza_2006_parts(s, e).len() > 3)
            .map(|e| vec![slot_str(s, e, "name")])
            .collect(),
    )
}

fn pizza_total_oracle(s: &Schema) -> Vec<String> {
    rows(
        items(s, "Employees")
            .into_iter()
            .filter_map(|e| {
                let group = g_pizza_2006_parts(s, e);
                let total = g_total(s, &group);
                if group.len() > 3 && total < Decimal::from(200) {
                    Some(vec![slot_str(s, e, "name"), total.to_string()])
                } else {
                    None
                }
            })
            .collect(),
    )
}

/// Employees who in 2007 ate dishes of the categories this employee ate
/// in 2006; distinct, kept as an item set.
fn zigzag_group(s: &Schema, e: ItemRef) -> Vec<ItemRef> {
    let mut categories = Vec::new();
    for o in g_orders_of_employee(s, e) {
        if slot_str(s, o, "date") != "2006" {
            continue;
        }
        for p in g_parts_of_order(s, o) {
            let dish = slot(s, p, "dish").unwrap();
            let cat = slot(s, dish, "category").unwrap();
            if !categories.contains(&cat) {
                categories.push(cat);
            }
        }
    }
    let mut group = Vec::new();
    for p in items(s, "OrderParts") {
        let order = slot(s, p, "order").unwrap();
        if slot_str(s, order, "date") != "2007" {
            continue;
        }
        let dish = slot(s, p, "dish").unwrap();
        let cat = slot(s, dish, "category").unwrap();
        if !categories.contains(&cat) {
            continue;
        }
        let emp = g_employee_of_order(s, order);
        if !group.contains(&emp) {
            group.push(emp);
        }
    }
    group
}

fn olap_cells_oracle(s: &Schema) -> Vec<String> {
    let mut out = Vec::new();
    for cntr in items(s, "Countries") {
        let has_customer = items(s, "Customers")
            .into_iter()
            .any(|cu| slot(s, cu, "country") == Some(cntr));
        if !has_customer {
            continue;
        }
        for ctgr in items(s, "Categories") {
            let mut total = Decimal::ZERO;
            let mut orders = Vec::new();
            for p in items(s, "OrderParts") {
                let order = slot(s, p, "order").unwrap();
                let customer = slot(s, order, "customer").unwrap();
                let country = slot(s, customer, "country").unwrap();
                let product = slot(s, p, "product").unwrap();
                let category = slot(s, product, "category").unwrap();
                if country == cntr && category == ctgr {
                    total += slot_dec(s, p, "price");
                    if !orders.contains(&order) {
                        orders.push(order);
                    }
                }
            }
            out.push(vec![
                slot_str(s, cntr, "code"),
                slot_str(s, ctgr, "id"),
                total.to_string(),
                orders.len().to_string(),
            ]);
        }
    }
    rows(out)
}

/// Run one corpus entry: parse, round-trip through the pretty printer,
/// evaluate, compare with the oracle. Returns an error message.
pub fn run_corpus_entry(entry: &CorpusEntry) -> Result<(), String> {
    let schema = fixture_by_name(entry.fixture);
    run_corpus_entry_on(entry, &schema)
}

/// Run one corpus entry against a specific model instance (for seeded
/// variants of the fixture schemas).
pub fn run_corpus_entry_on(entry: &CorpusEntry, schema: &Schema) -> Result<(), String> {
    let schema = schema.clone();
    let registry = if entry.fixture == "group1" {
        group1_registry(&schema)
    } else {
        DerivedRegistry::new()
    };
    let parsed = coql::parse_request(entry.query).map_err(|e| format!("{}: parse: {e}", entry.name))?;
    let printed = coql::print_request(&parsed);
    let reparsed =
        coql::parse_request(&printed).map_err(|e| format!("{}: re-parse: {e}", entry.name))?;
    if parsed != reparsed {
        return Err(format!("{}: pretty-print round trip changed the tree", entry.name));
    }
    let table = coql::run_query(&schema, &registry, None, entry.query)
        .map_err(|e| format!("{}: run: {e}", entry.name))?;
    let got = table.row_set(&schema);
    let want = (entry.oracle)(&schema);
    if got != want {
        return Err(format!(
            "{}: result mismatch\n  got  ({} rows): {:?}\n  want ({} rows): {:?}",
            entry.name,
            got.len(),
            &got[..got.len().min(5)],
            want.len(),
            &want[..want.len().min(5)]
        ));
    }
    Ok(())
}
