//! Built-in example models used by the test suites, the shell demos and
//! the documentation. All generated data is seeded and deterministic.

use rust_decimal::Decimal;

use crate::model::{ConceptId, ConceptKind, ItemRef, Schema};
use crate::oset::OrderedSet;
use crate::value::{Literal, ValueKind};

/// Splitmix64; tiny, stable across platforms and releases, which keeps
/// generated fixtures byte-identical forever.
#[derive(Debug, Clone)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len() as u64) as usize]
    }

    /// Pick by integer weight.
    pub fn weighted<'a, T>(&mut self, xs: &'a [(T, u32)]) -> &'a T {
        let total: u64 = xs.iter().map(|(_, w)| *w as u64).sum();
        let mut roll = self.below(total);
        for (value, w) in xs {
            if roll < *w as u64 {
                return value;
            }
            roll -= *w as u64;
        }
        &xs.last().unwrap().0
    }

    pub fn chance(&mut self, percent: u64) -> bool {
        self.below(100) < percent
    }
}

fn dec(units: i64, scale: u32) -> Literal {
    Literal::Dec(Decimal::new(units, scale))
}

/// One-level eight-element ordered set with six bottom-to-top paths;
/// element e3 sits over e5 and e6, e6 over e2 and e3.
pub fn fig4() -> OrderedSet {
    let mut s = OrderedSet::new();
    s.add("e4", &[]).unwrap();
    s.add("e5", &[]).unwrap();
    s.add("e6", &[]).unwrap();
    s.add("e1", &[("e4", "e4")]).unwrap();
    s.add("e2", &[("e4", "e4"), ("e5", "e5"), ("e6", "e6")]).unwrap();
    s.add("e3", &[("e5", "e5"), ("e6", "e6")]).unwrap();
    s
}

/// Two-level model with six concepts and thirteen items: primitive U, V,
/// W under X = (u, v, w), Y = (v, w) and bottom Z = (x, y). Reproduces
/// the five-column flattening with seventeen rows.
pub fn flat1() -> Schema {
    let mut s = Schema::new("flat1");
    s.define_concept("U", ConceptKind::Value(ValueKind::Int), &[]).unwrap();
    s.define_concept("V", ConceptKind::Value(ValueKind::Int), &[]).unwrap();
    s.define_concept("W", ConceptKind::Value(ValueKind::Int), &[]).unwrap();
    s.define_concept("X", ConceptKind::Entity, &[("u", "U"), ("v", "V"), ("w", "W")])
        .unwrap();
    s.define_concept("Y", ConceptKind::Entity, &[("v", "V"), ("w", "W")]).unwrap();
    s.define_concept("Z", ConceptKind::Entity, &[("x", "X"), ("y", "Y")]).unwrap();
    let u = s.concept_by_name("U").unwrap();
    let v = s.concept_by_name("V").unwrap();
    let w = s.concept_by_name("W").unwrap();
    let x = s.concept_by_name("X").unwrap();
    let y = s.concept_by_name("Y").unwrap();
    let z = s.concept_by_name("Z").unwrap();
    let i1 = s.ensure_value(u, Literal::Int(1)).unwrap();
    let i2 = s.ensure_value(u, Literal::Int(2)).unwrap();
    let i3 = s.ensure_value(v, Literal::Int(3)).unwrap();
    let i4 = s.ensure_value(v, Literal::Int(4)).unwrap();
    let i5 = s.ensure_value(w, Literal::Int(5)).unwrap();
    let i6 = s.ensure_value(w, Literal::Int(6)).unwrap();
    let i7 = s
        .add_item(x, "7", &[("u", Some(i1)), ("v", Some(i3))])
        .unwrap();
    s.add_item(x, "8", &[("u", Some(i2)), ("w", Some(i5))]).unwrap();
    s.add_item(x, "9", &[("v", Some(i4)), ("w", Some(i6))]).unwrap();
    let i10 = s
        .add_item(y, "10", &[("v", Some(i3)), ("w", Some(i5))])
        .unwrap();
    let i11 = s
        .add_item(y, "11", &[("v", Some(i4)), ("w", Some(i6))])
        .unwrap();
    s.add_item(z, "12", &[("x", Some(i7)), ("y", Some(i10))]).unwrap();
    s.add_item(z, "13", &[("x", Some(i7)), ("y", Some(i11))]).unwrap();
    s
}

/// Navigation fixture: D = {1,2,3}, C = (d: D) with items i1..i3,
/// F = (f: C) with items 4..6 referencing i2, i3, i3.
pub fn nav1() -> Schema {
    let mut s = Schema::new("nav1");
    s.define_concept("D", ConceptKind::Value(ValueKind::Int), &[]).unwrap();
    s.define_concept("C", ConceptKind::Entity, &[("d", "D")]).unwrap();
    s.define_concept("F", ConceptKind::Entity, &[("f", "C")]).unwrap();
    let d = s.concept_by_name("D").unwrap();
    let c = s.concept_by_name("C").unwrap();
    let f = s.concept_by_name("F").unwrap();
    let d2 = s.ensure_value(d, Literal::Int(2)).unwrap();
    let d3 = s.ensure_value(d, Literal::Int(3)).unwrap();
    s.ensure_value(d, Literal::Int(1)).unwrap();
    s.add_item(c, "i1", &[("d", Some(d2))]).unwrap();
    let i2 = s.add_item(c, "i2", &[("d", Some(d3))]).unwrap();
    let i3 = s.add_item(c, "i3", &[("d", Some(d3))]).unwrap();
    s.add_item(f, "4", &[("f", Some(i2))]).unwrap();
    s.add_item(f, "5", &[("f", Some(i3))]).unwrap();
    s.add_item(f, "6", &[("f", Some(i3))]).unwrap();
    s
}

/// Multi-dimensional projection fixture: P = (a: Q, b: Q).
pub fn md1() -> Schema {
    let mut s = Schema::new("md1");
    s.define_concept("Q", ConceptKind::Value(ValueKind::Str), &[]).unwrap();
    s.define_concept("P", ConceptKind::Entity, &[("a", "Q"), ("b", "Q")]).unwrap();
    let q = s.concept_by_name("Q").unwrap();
    let p = s.concept_by_name("P").unwrap();
    let q1 = s.ensure_value(q, Literal::Str("q1".into())).unwrap();
    let q2 = s.ensure_value(q, Literal::Str("q2".into())).unwrap();
    s.add_item(p, "p1", &[("a", Some(q1)), ("b", Some(q1))]).unwrap();
    s.add_item(p, "p2", &[("a", Some(q1)), ("b", Some(q2))]).unwrap();
    s
}

/// Inference fixture: Z = (x: X, y: Y) holding three of the six
/// syntactically possible combinations.
pub fn inf1() -> Schema {
    let mut s = Schema::new("inf1");
    s.define_concept("X", ConceptKind::Value(ValueKind::Str), &[]).unwrap();
    s.define_concept("Y", ConceptKind::Value(ValueKind::Str), &[]).unwrap();
    s.define_concept("Z", ConceptKind::Entity, &[("x", "X"), ("y", "Y")]).unwrap();
    let x = s.concept_by_name("X").unwrap();
    let y = s.concept_by_name("Y").unwrap();
    let z = s.concept_by_name("Z").unwrap();
    let x1 = s.ensure_value(x, Literal::Str("x1".into())).unwrap();
    let x2 = s.ensure_value(x, Literal::Str("x2".into())).unwrap();
    let y1 = s.ensure_value(y, Literal::Str("y1".into())).unwrap();
    let y2 = s.ensure_value(y, Literal::Str("y2".into())).unwrap();
    let y3 = s.ensure_value(y, Literal::Str("y3".into())).unwrap();
    s.add_item(z, "z1", &[("x", Some(x1)), ("y", Some(y1))]).unwrap();
    s.add_item(z, "z2", &[("x", Some(x1)), ("y", Some(y2))]).unwrap();
    s.add_item(z, "z3", &[("x", Some(x2)), ("y", Some(y3))]).unwrap();
    s
}

/// Two projects and two persons for Cartesian-product queries.
pub fn proj1() -> Schema {
    let mut s = Schema::new("proj1");
    s.define_concept("Names", ConceptKind::Value(ValueKind::Str), &[]).unwrap();
    s.define_concept("Budgets", ConceptKind::Value(ValueKind::Int), &[]).unwrap();
    s.define_concept("Ages", ConceptKind::Value(ValueKind::Int), &[]).unwrap();
    s.define_concept("Projects", ConceptKind::Entity, &[("name", "Names"), ("budget", "Budgets")])
        .unwrap();
    s.define_concept("Personnel", ConceptKind::Entity, &[("name", "Names"), ("age", "Ages")])
        .unwrap();
    let projects = s.concept_by_name("Projects").unwrap();
    let personnel = s.concept_by_name("Personnel").unwrap();
    let names = s.concept_by_name("Names").unwrap();
    let budgets = s.concept_by_name("Budgets").unwrap();
    let ages = s.concept_by_name("Ages").unwrap();
    for (key, name, budget) in [("prj1", "Alpha", 12), ("prj2", "Beta", 25)] {
        let n = s.ensure_value(names, Literal::Str(name.into())).unwrap();
        let b = s.ensure_value(budgets, Literal::Int(budget)).unwrap();
        s.add_item(projects, key, &[("name", Some(n)), ("budget", Some(b))]).unwrap();
    }
    for (key, name, age) in [("per1", "Ann", 28), ("per2", "Bob", 45)] {
        let n = s.ensure_value(names, Literal::Str(name.into())).unwrap();
        let a = s.ensure_value(ages, Literal::Int(age)).unwrap();
        s.add_item(personnel, key, &[("name", Some(n)), ("age", Some(a))]).unwrap();
    }
    s
}

/// Seeded restaurant model: ~30 employees, 150 orders, 500 order parts
/// over dishes with categories and prices. Bottom is OrderParts.
pub fn group1() -> Schema {
    group1_seeded(0x17C0DB)
}

/// `group1` with a caller-chosen seed; the schema is fixed, the data is
/// randomized, so query oracles can run over many instances.
pub fn group1_seeded(seed: u64) -> Schema {
    let mut s = Schema::new("group1");
    s.define_concept("Ages", ConceptKind::Value(ValueKind::Int), &[]).unwrap();
    s.define_concept("Categories", ConceptKind::Value(ValueKind::Str), &[]).unwrap();
    s.define_concept("Counts", ConceptKind::Value(ValueKind::Int), &[]).unwrap();
    s.define_concept("Dates", ConceptKind::Value(ValueKind::Date), &[]).unwrap();
    s.define_concept("Names", ConceptKind::Value(ValueKind::Str), &[]).unwrap();
    s.define_concept("Prices", ConceptKind::Value(ValueKind::Decimal), &[]).unwrap();
    s.define_concept("Employees", ConceptKind::Entity, &[("name", "Names"), ("age", "Ages")])
        .unwrap();
    s.define_concept("Orders", ConceptKind::Entity, &[("employee", "Employees"), ("date", "Dates")])
        .unwrap();
    s.define_concept(
        "Dishes",
        ConceptKind::Entity,
        &[("name", "Names"), ("category", "Categories"), ("price", "Prices")],
    )
    .unwrap();
    s.define_concept(
        "OrderParts",
        ConceptKind::Entity,
        &[("order", "Orders"), ("dish", "Dishes"), ("count", "Counts")],
    )
    .unwrap();

    let names = s.concept_by_name("Names").unwrap();
    let ages = s.concept_by_name("Ages").unwrap();
    let cats = s.concept_by_name("Categories").unwrap();
    let dates = s.concept_by_name("Dates").unwrap();
    let prices = s.concept_by_name("Prices").unwrap();
    let counts = s.concept_by_name("Counts").unwrap();
    let employees = s.concept_by_name("Employees").unwrap();
    let orders = s.concept_by_name("Orders").unwrap();
    let dishes = s.concept_by_name("Dishes").unwrap();
    let parts = s.concept_by_name("OrderParts").unwrap();

    let mut rng = Rng::new(seed);
    let mut emp_refs = Vec::new();
    for i in 1..=30u32 {
        let name = format!("Emp{i:02}");
        // Keep one employee at exactly age 30 for the equality queries.
        let age = if i == 7 { 30 } else { rng.range(22, 60) };
        let n = s.ensure_value(names, Literal::Str(name)).unwrap();
        let a = s.ensure_value(ages, Literal::Int(age)).unwrap();
        let e = s
            .add_item(employees, &format!("E{i:02}"), &[("name", Some(n)), ("age", Some(a))])
            .unwrap();
        emp_refs.push(e);
    }

    let year_weights = [("2005", 20u32), ("2006", 40), ("2007", 25), ("2008", 15)];
    let mut order_refs = Vec::new();
    for i in 1..=150u32 {
        let emp = *rng.pick(&emp_refs);
        let year = *rng.weighted(&year_weights);
        let d = s.ensure_value(dates, Literal::Str(year.into())).unwrap();
        let o = s
            .add_item(orders, &format!("O{i:03}"), &[("employee", Some(emp)), ("date", Some(d))])
            .unwrap();
        order_refs.push(o);
    }

    let category_weights = [
        ("pizza", 35u32),
        ("soup", 15),
        ("salad", 15),
        ("pasta", 20),
        ("dessert", 15),
    ];
    let mut dish_refs = Vec::new();
    for i in 1..=20u32 {
        let name = format!("Dish{i:02}");
        let cat = *rng.weighted(&category_weights);
        let price = dec(rng.range(250, 2449), 2);
        let n = s.ensure_value(names, Literal::Str(name)).unwrap();
        let c = s.ensure_value(cats, Literal::Str(cat.into())).unwrap();
        let p = s.ensure_value(prices, price).unwrap();
        let dref = s
            .add_item(
                dishes,
                &format!("D{i:02}"),
                &[("name", Some(n)), ("category", Some(c)), ("price", Some(p))],
            )
            .unwrap();
        dish_refs.push(dref);
    }

    for i in 1..=500u32 {
        let order = *rng.pick(&order_refs);
        let dish = *rng.pick(&dish_refs);
        let count = rng.range(1, 5);
        let c = s.ensure_value(counts, Literal::Int(count)).unwrap();
        s.add_item(
            parts,
            &format!("P{i:03}"),
            &[("order", Some(order)), ("dish", Some(dish)), ("count", Some(c))],
        )
        .unwrap();
    }
    s
}

/// Seeded snowflake model for multi-dimensional analysis: order parts
/// graded by customer country and product category. One country has no
/// customers and one customer never orders, so cube cells can be empty.
pub fn olap1() -> Schema {
    olap1_seeded(0x01A9_64)
}

/// `olap1` with a caller-chosen seed.
pub fn olap1_seeded(seed: u64) -> Schema {
    let mut s = Schema::new("olap1");
    s.define_concept("Codes", ConceptKind::Value(ValueKind::Str), &[]).unwrap();
    s.define_concept("Counts", ConceptKind::Value(ValueKind::Int), &[]).unwrap();
    s.define_concept("Dates", ConceptKind::Value(ValueKind::Date), &[]).unwrap();
    s.define_concept("Names", ConceptKind::Value(ValueKind::Str), &[]).unwrap();
    s.define_concept("Prices", ConceptKind::Value(ValueKind::Decimal), &[]).unwrap();
    s.define_concept("Countries", ConceptKind::Entity, &[("code", "Codes")]).unwrap();
    s.define_concept("Categories", ConceptKind::Entity, &[("id", "Codes")]).unwrap();
    s.define_concept("Customers", ConceptKind::Entity, &[("name", "Names"), ("country", "Countries")])
        .unwrap();
    s.define_concept("Orders", ConceptKind::Entity, &[("customer", "Customers"), ("date", "Dates")])
        .unwrap();
    s.define_concept("Products", ConceptKind::Entity, &[("name", "Names"), ("category", "Categories")])
        .unwrap();
    s.define_concept(
        "OrderParts",
        ConceptKind::Entity,
        &[("order", "Orders"), ("product", "Products"), ("price", "Prices"), ("qty", "Counts")],
    )
    .unwrap();

    let codes = s.concept_by_name("Codes").unwrap();
    let names = s.concept_by_name("Names").unwrap();
    let dates = s.concept_by_name("Dates").unwrap();
    let prices = s.concept_by_name("Prices").unwrap();
    let counts = s.concept_by_name("Counts").unwrap();
    let countries = s.concept_by_name("Countries").unwrap();
    let categories = s.concept_by_name("Categories").unwrap();
    let customers = s.concept_by_name("Customers").unwrap();
    let orders = s.concept_by_name("Orders").unwrap();
    let products = s.concept_by_name("Products").unwrap();
    let parts = s.concept_by_name("OrderParts").unwrap();

    let mut rng = Rng::new(seed);
    let mut country_refs = Vec::new();
    for code in ["DE", "FR", "IT", "MD", "UK", "US"] {
        let c = s.ensure_value(codes, Literal::Str(code.into())).unwrap();
        let r = s.add_item(countries, code, &[("code", Some(c))]).unwrap();
        country_refs.push((code, r));
    }
    let mut category_refs = Vec::new();
    for id in ["beverages", "dairy", "meat", "produce", "seafood"] {
        let c = s.ensure_value(codes, Literal::Str(id.into())).unwrap();
        let r = s.add_item(categories, id, &[("id", Some(c))]).unwrap();
        category_refs.push(r);
    }
    // MD gets no customers; the UK customer (C01) places no orders.
    let mut customer_refs = Vec::new();
    for i in 1..=12u32 {
        let code = match i {
            1 => "UK",
            _ => *rng.pick(&["DE", "DE", "FR", "IT", "US"]),
        };
        let country = country_refs.iter().find(|(c, _)| *c == code).unwrap().1;
        let n = s
            .ensure_value(names, Literal::Str(format!("Customer{i:02}")))
            .unwrap();
        let r = s
            .add_item(customers, &format!("C{i:02}"), &[("name", Some(n)), ("country", Some(country))])
            .unwrap();
        if i > 1 {
            customer_refs.push(r);
        }
    }
    let mut order_refs = Vec::new();
    for i in 1..=40u32 {
        let customer = *rng.pick(&customer_refs);
        let year = *rng.pick(&["2006", "2007", "2007", "2008"]);
        let d = s.ensure_value(dates, Literal::Str(year.into())).unwrap();
        let o = s
            .add_item(orders, &format!("O{i:02}"), &[("customer", Some(customer)), ("date", Some(d))])
            .unwrap();
        order_refs.push(o);
    }
    let mut product_refs = Vec::new();
    for i in 1..=15u32 {
        let category = *rng.pick(&category_refs);
        let n = s
            .ensure_value(names, Literal::Str(format!("Product{i:02}")))
            .unwrap();
        let p = s
            .add_item(products, &format!("PR{i:02}"), &[("name", Some(n)), ("category", Some(category))])
            .unwrap();
        product_refs.push(p);
    }
    for i in 1..=120u32 {
        let order = *rng.pick(&order_refs);
        let product = *rng.pick(&product_refs);
        let price = dec(rng.range(199, 9999), 2);
        let qty = rng.range(1, 9);
        let p = s.ensure_value(prices, price).unwrap();
        let q = s.ensure_value(counts, Literal::Int(qty)).unwrap();
        s.add_item(
            parts,
            &format!("P{i:03}"),
            &[("order", Some(order)), ("product", Some(product)), ("price", Some(p)), ("qty", Some(q))],
        )
        .unwrap();
    }
    s
}

/// Random small two-level model for oracle-equivalence suites. Concepts
/// form a DAG, the last entity concept is designated bottom, and slot
/// vectors are deduplicated so primitive-semantics relations stay sound.
pub fn random_model(seed: u64) -> Schema {
    let mut rng = Rng::new(seed);
    let mut s = Schema::new(&format!("random{seed}"));
    let value_count = rng.range(1, 2) as usize;
    for i in 0..value_count {
        s.define_concept(&format!("V{i}"), ConceptKind::Value(ValueKind::Int), &[]).unwrap();
    }
    let entity_count = rng.range(2, 4) as usize;
    for i in 0..entity_count {
        let existing: Vec<String> = s
            .concept_ids()
            .map(|c| s.concept(c).name.clone())
            .collect();
        let dim_count = rng.range(1, 2.min(existing.len() as i64)) as usize;
        let mut dims: Vec<(String, String)> = Vec::new();
        for d in 0..dim_count {
            let domain = rng.pick(&existing).clone();
            dims.push((format!("d{d}"), domain));
        }
        let dims_ref: Vec<(&str, &str)> = dims.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        s.define_concept(&format!("E{i}"), ConceptKind::Entity, &dims_ref).unwrap();
    }
    let bottom = s.concept_by_name(&format!("E{}", entity_count - 1)).unwrap();
    s.set_bottom(bottom);

    for i in 0..value_count {
        let c = s.concept_by_name(&format!("V{i}")).unwrap();
        for v in 0..rng.range(2, 4) {
            s.ensure_value(c, Literal::Int(v)).unwrap();
        }
    }
    let mut total = 0usize;
    for i in 0..entity_count {
        let cid = s.concept_by_name(&format!("E{i}")).unwrap();
        let dims: Vec<(String, ConceptId)> = s
            .concept(cid)
            .dims
            .iter()
            .map(|d| (d.name.clone(), d.domain))
            .collect();
        let want = rng.range(2, 6) as usize;
        let mut made = 0usize;
        let mut attempt = 0usize;
        while made < want && attempt < want * 4 && total < 30 {
            attempt += 1;
            let key = format!("e{i}_{attempt}");
            let mut slots: Vec<(String, Option<ItemRef>)> = Vec::new();
            for (dim, domain) in &dims {
                let choice = if rng.chance(20) {
                    None
                } else {
                    let pool: Vec<ItemRef> = s.items(*domain).collect();
                    if pool.is_empty() {
                        None
                    } else {
                        Some(*rng.pick(&pool))
                    }
                };
                slots.push((dim.clone(), choice));
            }
            // Skip duplicate slot vectors to keep items semantically distinct.
            let duplicate = s.items(cid).any(|other| {
                let vec: Vec<Option<ItemRef>> = dims
                    .iter()
                    .enumerate()
                    .map(|(k, _)| slots[k].1)
                    .collect();
                s.slots_of(other) == vec.as_slice()
            });
            if duplicate {
                continue;
            }
            let slots_ref: Vec<(&str, Option<ItemRef>)> =
                slots.iter().map(|(d, v)| (d.as_str(), *v)).collect();
            s.add_item(cid, &key, &slots_ref).unwrap();
            made += 1;
            total += 1;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_validate() {
        for schema in [flat1(), nav1(), md1(), inf1(), group1(), olap1()] {
            let report = schema.validate();
            assert!(report.violations.is_empty(), "{}: {report:?}", schema.name);
        }
    }

    #[test]
    fn group1_shape() {
        let s = group1();
        assert_eq!(s.item_count(s.concept_by_name("Employees").unwrap()), 30);
        assert_eq!(s.item_count(s.concept_by_name("Orders").unwrap()), 150);
        assert_eq!(s.item_count(s.concept_by_name("OrderParts").unwrap()), 500);
        assert_eq!(s.bottom().unwrap(), s.concept_by_name("OrderParts").unwrap());
    }

    #[test]
    fn olap1_bottom_and_paths() {
        let s = olap1();
        let parts = s.concept_by_name("OrderParts").unwrap();
        assert_eq!(s.bottom().unwrap(), parts);
        // the snowflake dimension path from facts to product categories
        let cats = s.concept_by_name("Categories").unwrap();
        let paths = s.concept_paths(parts, Some(cats)).unwrap();
        assert_eq!(paths, vec![crate::oset::DimPath::parse("product.category")]);
    }

    #[test]
    fn random_models_are_valid() {
        for seed in 0..50 {
            let s = random_model(seed);
            let report = s.validate();
            assert!(report.violations.is_empty(), "seed {seed}: {report:?}");
            assert!(s.total_items() <= 30 + 8);
        }
    }

    #[test]
    fn rng_is_stable() {
        let mut rng = Rng::new(42);
        let first: Vec<u64> = (0..4).map(|_| rng.below(1000)).collect();
        let mut rng = Rng::new(42);
        let second: Vec<u64> = (0..4).map(|_| rng.below(1000)).collect();
        assert_eq!(first, second);
    }
}
