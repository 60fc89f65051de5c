use super::*;
use crate::fixtures;

fn parse_rt(text: &str) {
    let first = parse_request(text).unwrap();
    let printed = print_request(&first);
    let second = parse_request(&printed)
        .unwrap_or_else(|e| panic!("re-parse of `{printed}` failed: {e}"));
    assert_eq!(first, second, "round trip changed the tree for `{text}`");
}

#[test]
fn pretty_round_trips() {
    for text in [
        "SELECT * FROM Employees",
        "FROM Employees SELECT *",
        "AVERAGE( SELECT age FROM Employees )",
        "SELECT * FROM (SELECT * FROM Employees) WHERE age > 30",
        "FROM (Employees | age == 30) SELECT *",
        "FROM (Employees emp | emp.age == 30) SELECT emp.name",
        "FROM (Employees e | COUNT( e <- employee <- Orders ) > 5) SELECT e.name",
        "FROM ( Projects project, Personnel person ) SELECT ( project.name, person.name )",
        "FROM ( Projects project, Personnel person ) WHERE ( person.age > 30 AND project.budget < 20 ) SELECT ( project.name, person.name )",
        "FORALL ( Projects project, Personnel person ) { IF ( person.age > 30 AND project.budget < 20 ) RETURN (project.name, person.name ); }",
        "FROM Employees e WHERE COUNT( e <- employee <- order <- (OrderParts | order.date == '2006' AND dish.category == 'pizza') ) > 3 SELECT e.name",
        "FROM Employees e { Collection group = e <- employee <- order <- (OrderParts | order.date == '2006' AND dish.category == 'pizza'); double total = SUM( group.<count * dish.price> ); } WHERE COUNT( group ) > 3 AND total < 200 SELECT e.name, total",
        "FROM (Countries cntr, Categories ctgr) { Collection grp = [ cntr <- country <- customer <- order <- OrderParts AND ctgr <- category <- product <- OrderParts ]; double total = SUM( grp.price ); integer cnt = COUNT( grp -> order ); } WHERE COUNT(cntr <- country <- Customers) > 0 SELECT cntr.code, ctgr.id, total, cnt",
        "FROM Employees e SELECT e.name, SUM( group ) AS total",
        "FORALL Employees e { Item n = e.name; RETURN (n); }",
        "1 + 2 * 3 - -4",
        "(1 + 2) * 3",
        "NOT (x == 3) AND y < 2 OR z >= 'a'",
    ] {
        parse_rt(text);
    }
}

#[test]
fn count_shortcut_rewrites() {
    let s = fixtures::olap1();
    let registry = DerivedRegistry::new();
    let q = parse_query(
        "FROM (Countries cntr, Categories ctgr) WHERE ( cntr <- country <- Customers > 0 ) SELECT cntr.code",
    )
    .unwrap();
    let checked = check(&q, &s, &registry).unwrap();
    let printed = print_query(&checked);
    assert!(
        printed.contains("COUNT(cntr <- country <- Customers) > 0"),
        "shortcut not rewritten: {printed}"
    );
}

#[test]
fn bare_dimensions_resolve_to_this() {
    let s = fixtures::group1();
    let registry = DerivedRegistry::new();
    let q = parse_query("SELECT age FROM Employees").unwrap();
    let checked = check(&q, &s, &registry).unwrap();
    let printed = print_query(&checked);
    assert!(printed.contains("this.age"), "{printed}");
}

#[test]
fn check_errors() {
    let s = fixtures::group1();
    let registry = DerivedRegistry::new();
    let err = |text: &str| check(&parse_query(text).unwrap(), &s, &registry).unwrap_err();
    assert!(matches!(
        err("SELECT * FROM NoSuch"),
        CoqlError::UnknownConcept(name) if name == "NoSuch"
    ));
    assert!(matches!(
        err("FROM Employees e SELECT e.salary"),
        CoqlError::UnknownDimension { dim, .. } if dim == "salary"
    ));
    assert!(matches!(
        err("FROM Employees e { RETURN (e.name); } SELECT e.name"),
        CoqlError::BothReturnAndSelect
    ));
    assert!(matches!(
        err("FROM (Employees e, Orders o) SELECT *"),
        CoqlError::StarNeedsSingleSource
    ));
    assert!(matches!(
        err("FROM Employees e WHERE e.age > 'x' SELECT e.name"),
        CoqlError::TypeMismatch(_)
    ));
    assert!(matches!(
        err("FROM Employees e WHERE q.age > 30 SELECT e.name"),
        CoqlError::UnboundVariable(name) if name == "q"
    ));
}

#[test]
fn eval_cartesian_product() {
    let s = fixtures::proj1();
    let registry = DerivedRegistry::new();
    let out = run_query(
        &s,
        &registry,
        None,
        "FROM ( Projects project, Personnel person ) SELECT ( project.name, person.name )",
    )
    .unwrap();
    assert_eq!(out.rows.len(), 4);
    assert_eq!(out.columns, vec!["project.name", "person.name"]);
}

#[test]
fn declarative_equals_imperative() {
    let s = fixtures::proj1();
    let registry = DerivedRegistry::new();
    let declarative = run_query(
        &s,
        &registry,
        None,
        "FROM ( Projects project, Personnel person ) \
         WHERE ( person.age > 30 AND project.budget < 20 ) \
         SELECT ( project.name, person.name )",
    )
    .unwrap();
    let imperative = run_query(
        &s,
        &registry,
        None,
        "FORALL ( Projects project, Personnel person ) { \
         IF ( person.age > 30 AND project.budget < 20 ) \
         RETURN (project.name, person.name ); }",
    )
    .unwrap();
    assert_eq!(declarative.row_set(&s), imperative.row_set(&s));
    assert_eq!(declarative.rows.len(), 1);
    assert_eq!(declarative.rows[0][0].render(&s), "Alpha");
    assert_eq!(declarative.rows[0][1].render(&s), "Bob");
}

#[test]
fn filters_and_average() {
    let s = fixtures::group1();
    let registry = DerivedRegistry::new();
    let thirty = run_query(&s, &registry, None, "FROM (Employees | age == 30) SELECT *").unwrap();
    assert!(!thirty.rows.is_empty());
    let avg = run_query(&s, &registry, None, "AVERAGE( SELECT age FROM Employees )").unwrap();
    assert_eq!(avg.rows.len(), 1);
    match &avg.rows[0][0] {
        Value::Dec(_) => {}
        other => panic!("expected decimal average, got {other:?}"),
    }
    // filter algebra: nested filters compose like AND
    let nested = run_query(
        &s,
        &registry,
        None,
        "FROM ((Employees | age > 30) | age < 40) SELECT name",
    )
    .unwrap();
    let anded = run_query(
        &s,
        &registry,
        None,
        "FROM (Employees | age > 30 AND age < 40) SELECT name",
    )
    .unwrap();
    assert_eq!(nested.row_set(&s), anded.row_set(&s));
}

#[test]
fn derived_properties() {
    let s = fixtures::group1();
    let mut registry = DerivedRegistry::new();
    let def = parse_property("Employees::orders() { RETURN this <- employee <- Orders; }").unwrap();
    register_derived(&mut registry, &s, &def).unwrap();

    let via_prop = run_query(
        &s,
        &registry,
        None,
        "FROM Employees e WHERE COUNT(e.orders()) > 5 SELECT e.name",
    )
    .unwrap();
    let direct = run_query(
        &s,
        &registry,
        None,
        "FROM Employees e WHERE COUNT(e <- employee <- Orders) > 5 SELECT e.name",
    )
    .unwrap();
    assert_eq!(via_prop.row_set(&s), direct.row_set(&s));
    assert!(!via_prop.rows.is_empty());

    // parameterized property: orders containing at least one part of the
    // given category
    let def = parse_property(
        "Employees::orders(Categories c) { \
         RETURN this <- employee <- (Orders o | \
         COUNT(o <- order <- (OrderParts p | p.dish.category == c)) > 0); }",
    )
    .unwrap();
    register_derived(&mut registry, &s, &def).unwrap();
    let pizza_orders = run_query(
        &s,
        &registry,
        None,
        "FROM Employees e SELECT e.name, COUNT(e.orders('pizza')) AS pizza",
    )
    .unwrap();
    assert_eq!(pizza_orders.rows.len(), 30);
    // the filtered property is a subset of the unfiltered one
    let all = run_query(
        &s,
        &registry,
        None,
        "FROM Employees e SELECT COUNT(e.orders()) AS a, COUNT(e.orders('pizza')) AS b",
    )
    .unwrap();
    for row in &all.rows {
        let (Value::Int(a), Value::Int(b)) = (&row[0], &row[1]) else {
            panic!("expected ints");
        };
        assert!(b <= a);
    }

    // duplicate and recursive registrations are rejected
    let dup = parse_property("Employees::orders() { RETURN this <- employee <- Orders; }").unwrap();
    assert!(matches!(
        register_derived(&mut registry, &s, &dup),
        Err(CoqlError::DuplicateProperty { .. })
    ));
    let rec = parse_property("Employees::selfy() { RETURN this.selfy(); }").unwrap();
    assert!(matches!(
        register_derived(&mut registry, &s, &rec),
        Err(CoqlError::RecursiveProperty(_))
    ));
}

#[test]
fn runtime_errors() {
    let s = fixtures::group1();
    let registry = DerivedRegistry::new();
    assert!(matches!(
        run_query(&s, &registry, None, "1 / 0"),
        Err(CoqlError::DivisionByZero)
    ));
    assert!(matches!(
        run_query(&s, &registry, None, "AVERAGE( SELECT age FROM (Employees | age > 1000) )"),
        Err(CoqlError::EmptyAverage)
    ));
    // dot navigation through a null slot is an error
    let mut s2 = fixtures::group1();
    let orders = s2.concept_by_name("Orders").unwrap();
    s2.add_item(orders, "Onull", &[]).unwrap();
    let err = run_query(
        &s2,
        &registry,
        None,
        "FROM Orders o SELECT o.employee.name",
    )
    .unwrap_err();
    assert!(matches!(err, CoqlError::NullNavigation(_)));
}

#[test]
fn elementary_constraints_must_be_local() {
    let s = fixtures::group1();
    let registry = DerivedRegistry::new();
    let employees = s.concept_by_name("Employees").unwrap();
    let ok = local_possibility(
        &s,
        &registry,
        employees,
        &parse_expr_text("age >= 30").unwrap(),
    )
    .unwrap();
    assert!(ok.possible_count() > 0);
    assert!(ok.possible_count() < 30);
    let err = local_possibility(
        &s,
        &registry,
        employees,
        &parse_expr_text("COUNT(this <- employee <- Orders) > 3").unwrap(),
    )
    .unwrap_err();
    assert!(matches!(err, CoqlError::NonLocalPredicate(_)));
    // navigation deeper than the item's own slots is not elementary
    let parts = s.concept_by_name("OrderParts").unwrap();
    let err = local_possibility(
        &s,
        &registry,
        parts,
        &parse_expr_text("order.date == '2006'").unwrap(),
    )
    .unwrap_err();
    assert!(matches!(err, CoqlError::NonLocalPredicate(_)));
}

#[test]
fn select_defaults() {
    let s = fixtures::proj1();
    let registry = DerivedRegistry::new();
    // no SELECT: the tuple of item references
    let out = run_query(&s, &registry, None, "FROM ( Projects p, Personnel q )").unwrap();
    assert_eq!(out.columns, vec!["p", "q"]);
    assert_eq!(out.rows.len(), 4);
    assert!(matches!(out.rows[0][0], Value::Item(_)));
}

#[test]
fn constraint_scoped_evaluation() {
    use crate::propagate::{propagate_down, ConstraintKind, ConstraintSet};
    let s = fixtures::group1();
    let registry = DerivedRegistry::new();
    let employees = s.concept_by_name("Employees").unwrap();
    // prohibit employees younger than 40, propagate down
    let keep = local_possibility(
        &s,
        &registry,
        employees,
        &parse_expr_text("age >= 40").unwrap(),
    )
    .unwrap();
    let mut cs = ConstraintSet::new(ConstraintKind::QueryScoped);
    cs.impose(&s, keep.clone());
    let cs = propagate_down(&s, &cs, None);

    let constrained = run_query(
        &s,
        &registry,
        Some(&cs),
        "FROM Orders o SELECT o.employee.name",
    )
    .unwrap();
    // equivalent to deleting the impossible items from a copy
    let mut reduced = s.clone();
    let impossible: Vec<_> = {
        let parts = reduced.concept_by_name("OrderParts").unwrap();
        let orders = reduced.concept_by_name("Orders").unwrap();
        let mut dead = Vec::new();
        for c in [parts, orders, employees] {
            for item in reduced.items(c).collect::<Vec<_>>() {
                if !cs.is_possible(item) {
                    dead.push(item);
                }
            }
        }
        dead
    };
    for item in impossible {
        reduced.delete_item(item).unwrap();
    }
    let plain = run_query(&reduced, &registry, None, "FROM Orders o SELECT o.employee.name").unwrap();
    assert_eq!(constrained.row_set(&s), plain.row_set(&reduced));
}

#[test]
fn cube_filters_and_counts() {
    use crate::oset::DimPath;
    let s = fixtures::olap1();
    let registry = DerivedRegistry::new();
    let parts = s.concept_by_name("OrderParts").unwrap();
    let countries = s.concept_by_name("Countries").unwrap();
    let price = parse_expr_text("price").unwrap();
    let measures = [cube::CubeMeasure {
        name: "cnt".into(),
        func: AggFunc::Count,
        expr: price.clone(),
    }];
    // level filter trims the country axis
    let filtered = cube::cube(
        &s,
        &registry,
        None,
        parts,
        &[cube::CubeDim {
            path: DimPath::parse("order.customer.country"),
            level: countries,
            filter: Some(parse_expr_text("code != 'MD'").unwrap()),
        }],
        None,
        &measures,
    )
    .unwrap();
    assert_eq!(filtered.rows.len(), 5);
    // fact filter restricts the grouped facts
    let qty_gate = parse_expr_text("qty > 5").unwrap();
    let gated = cube::cube(
        &s,
        &registry,
        None,
        parts,
        &[cube::CubeDim {
            path: DimPath::parse("order.customer.country"),
            level: countries,
            filter: None,
        }],
        Some(&qty_gate),
        &measures,
    )
    .unwrap();
    let total_gated: i64 = gated
        .rows
        .iter()
        .map(|r| match r[1] {
            Value::Int(n) => n,
            _ => panic!("count measure must be an integer"),
        })
        .sum();
    let oracle = s
        .items(parts)
        .filter(|p| {
            let qty = s.get_slot(*p, "qty").unwrap().unwrap();
            matches!(s.value_of(qty), Some(crate::value::Literal::Int(n)) if *n > 5)
        })
        .count() as i64;
    assert_eq!(total_gated, oracle);
    // a bad dimension path reports PathMismatch
    let err = cube::cube(
        &s,
        &registry,
        None,
        parts,
        &[cube::CubeDim {
            path: DimPath::parse("order.customer"),
            level: countries,
            filter: None,
        }],
        None,
        &measures,
    )
    .unwrap_err();
    assert!(matches!(err, CoqlError::PathMismatch(_)));
}
