//! Property suites: order-theoretic invariants on random structures and
//! brute-force cross-checks of the navigation algebra.

mod common;

use std::collections::HashSet;

use comdb::fixtures::{self, Rng};
use comdb::flatten::flatten_default;
use comdb::model::{ItemRef, Schema};
use comdb::navigate::{self, Collection, PathStep};
use comdb::oset::{Combination, DimPath, Direction, OrderedSet};
use proptest::prelude::*;

/// Random small DAG built bottom-up; supers always point at earlier
/// elements, so construction cannot cycle.
fn random_oset(seed: u64, max_nodes: usize) -> OrderedSet {
    let mut rng = Rng::new(seed);
    let mut set = OrderedSet::new();
    let n = 2 + (rng.below(max_nodes as u64 - 1) as usize);
    let mut names = Vec::new();
    for i in 0..n {
        let name = format!("n{i}");
        let mut supers = Vec::new();
        if !names.is_empty() {
            let count = rng.below(3.min(names.len() as u64) + 1) as usize;
            let mut picked: Vec<&String> = Vec::new();
            for _ in 0..count {
                let cand = rng.pick(&names);
                if !picked.contains(&cand) {
                    picked.push(cand);
                }
            }
            for (j, target) in picked.into_iter().enumerate() {
                supers.push((format!("x{j}"), target.clone()));
            }
        }
        let supers_ref: Vec<(&str, &str)> = supers
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        set.add(&name, &supers_ref).unwrap();
        names.push(name);
    }
    set
}

proptest! {
    /// Path-count duality: the number of bottom-to-top paths is the same
    /// counted upward or downward, and equals the column count of the
    /// flattened binary table.
    #[test]
    fn path_count_duality(seed in 0u64..500) {
        let set = random_oset(seed, 8);
        let up = set.metrics(set.bottom()).unwrap().primitive_dimensionality;
        let down = set.metrics(set.top()).unwrap().primitive_cardinality;
        prop_assert_eq!(up, down);
        let table = set.flatten_binary();
        prop_assert_eq!(table.columns.len(), up);
        // columns enumerated explicitly agree
        let paths = set.paths_between(set.bottom(), set.top(), Direction::Up).unwrap();
        prop_assert_eq!(paths.len(), up);
    }

    /// Flatten row-count law: one row per downward path per element, the
    /// empty path included for bottom.
    #[test]
    fn flatten_row_count(seed in 0u64..500) {
        let set = random_oset(seed, 8);
        let table = set.flatten_binary();
        let mut expected = 1usize; // bottom's empty sub-dimension
        for e in set.user_elements() {
            expected += set.metrics(e).unwrap().primitive_cardinality;
        }
        prop_assert_eq!(table.rows.len(), expected);
        // topological sort still succeeds after all mutations
        prop_assert!(set.topo_sort().is_ok());
    }

    /// The induced specific-general relation is a partial order on
    /// aligned combinations.
    #[test]
    fn induced_order_is_partial(seed in 0u64..300) {
        let mut rng = Rng::new(seed);
        let mut set = OrderedSet::new();
        for i in 0..4 {
            set.add(&format!("v{i}"), &[]).unwrap();
        }
        let pool: Vec<_> = set.user_elements().collect();
        let labels = ["a", "b", "c"];
        let mut combos = Vec::new();
        for _ in 0..5 {
            let bindings: Vec<(String, Option<comdb::ElementId>)> = labels
                .iter()
                .map(|l| {
                    let v = if rng.chance(30) {
                        None
                    } else {
                        Some(*rng.pick(&pool))
                    };
                    (l.to_string(), v)
                })
                .collect();
            combos.push(Combination::new(bindings).unwrap());
        }
        for a in &combos {
            prop_assert!(set.induced_leq(a, a).unwrap());
            for b in &combos {
                for c in &combos {
                    let ab = set.induced_leq(a, b).unwrap();
                    let bc = set.induced_leq(b, c).unwrap();
                    if ab && bc {
                        prop_assert!(set.induced_leq(a, c).unwrap(), "transitivity");
                    }
                }
                // antisymmetry up to equal binding sets
                if set.induced_leq(a, b).unwrap() && set.induced_leq(b, a).unwrap() {
                    let mut av = a.bindings().to_vec();
                    let mut bv = b.bindings().to_vec();
                    av.sort();
                    bv.sort();
                    prop_assert_eq!(av, bv, "antisymmetry");
                }
            }
        }
    }

    /// reduce and extend are inverse where defined.
    #[test]
    fn reduce_extend_inverse(seed in 0u64..200) {
        let mut rng = Rng::new(seed);
        let mut set = OrderedSet::new();
        for i in 0..3 {
            set.add(&format!("v{i}"), &[]).unwrap();
        }
        let pool: Vec<_> = set.user_elements().collect();
        let bindings: Vec<(String, Option<comdb::ElementId>)> = (0..3)
            .map(|i| {
                let v = if rng.chance(25) { None } else { Some(*rng.pick(&pool)) };
                (format!("x{i}"), v)
            })
            .collect();
        let combo = Combination::new(bindings).unwrap();
        for (label, value) in combo.bindings().to_vec() {
            let reduced = combo.reduce(&label).unwrap();
            let back = reduced.extend(&label, value).unwrap();
            let mut lhs = back.bindings().to_vec();
            let mut rhs = combo.bindings().to_vec();
            lhs.sort();
            rhs.sort();
            prop_assert_eq!(lhs, rhs);
        }
        // extending with null keeps the combination equivalent under the
        // induced order once aligned
        let extended = combo.extend("fresh", None).unwrap();
        let aligned = combo.extend("fresh", None).unwrap();
        prop_assert!(set.induced_leq(&extended, &aligned).unwrap());
        prop_assert!(set.induced_leq(&aligned, &extended).unwrap());
    }
}

fn all_items(s: &Schema) -> Vec<ItemRef> {
    s.concept_ids().flat_map(|c| s.items(c).collect::<Vec<_>>()).collect()
}

/// Galois-style adjunction between projection and de-projection, checked
/// by brute force over random models.
#[test]
fn projection_deprojection_adjunction() {
    let mut models = 0;
    for seed in 0..100u64 {
        let s = fixtures::random_model(seed ^ 0xAD);
        let mut rng = Rng::new(seed);
        for cid in s.concept_ids() {
            let cdef = s.concept(cid).clone();
            for dim in &cdef.dims {
                let full = Collection::of_concept(&s, cid);
                if full.is_empty() {
                    continue;
                }
                // random subset S of the sub concept
                let members: Vec<ItemRef> =
                    full.members.iter().copied().filter(|_| !rng.chance(40)).collect();
                let sub = Collection::new(cid, members);
                let path = DimPath(vec![dim.name.clone()]);
                // deproject(project(S)) contains every member of S whose
                // slot is non-null
                let projected = navigate::project(&s, &sub, &path).unwrap();
                let back = navigate::deproject(&s, &projected, &dim.name, &full).unwrap();
                for m in &sub.members {
                    let idx = cdef.dim_index(&dim.name).unwrap();
                    if s.slots_of(*m)[idx].is_some() {
                        assert!(back.contains(*m), "seed {seed}: S not inside round trip");
                    }
                }
                // project(deproject(E)) contains every member of E that is
                // referenced by some item
                let domain_coll = Collection::of_concept(&s, dim.domain);
                let e_members: Vec<ItemRef> = domain_coll
                    .members
                    .iter()
                    .copied()
                    .filter(|_| !rng.chance(40))
                    .collect();
                let e = Collection::new(dim.domain, e_members);
                let down = navigate::deproject(&s, &e, &dim.name, &full).unwrap();
                let up = navigate::project(&s, &down, &path).unwrap();
                let idx = cdef.dim_index(&dim.name).unwrap();
                for v in &e.members {
                    let referenced = full
                        .members
                        .iter()
                        .any(|m| s.slots_of(*m)[idx] == Some(*v));
                    if referenced {
                        assert!(up.contains(*v), "seed {seed}: E member lost");
                    }
                }
            }
        }
        models += 1;
    }
    assert_eq!(models, 100);
}

/// Every corpus query keeps matching its nested-loop oracle when the
/// fixture data is re-randomized under different seeds.
#[test]
fn corpus_oracles_on_randomized_instances() {
    for seed in [7u64, 99, 4242] {
        let group1 = fixtures::group1_seeded(seed);
        let olap1 = fixtures::olap1_seeded(seed.rotate_left(13));
        for entry in common::corpus() {
            let result = match entry.fixture {
                "group1" => common::run_corpus_entry_on(&entry, &group1),
                "olap1" => common::run_corpus_entry_on(&entry, &olap1),
                _ => common::run_corpus_entry(&entry),
            };
            if let Err(e) = result {
                panic!("seed {seed}: {e}");
            }
        }
    }
}

/// Splitting an access path at any point and composing the two halves
/// equals evaluating it whole.
#[test]
fn eval_path_associativity() {
    let s = fixtures::nav1();
    let f = s.concept_by_name("F").unwrap();
    let steps = vec![
        PathStep::Project(DimPath::parse("f")),
        PathStep::Project(DimPath::parse("d")),
        PathStep::Deproject {
            dims: vec!["d".into(), "f".into()],
            target: f,
        },
        PathStep::Project(DimPath::parse("f")),
        PathStep::Project(DimPath::parse("d")),
    ];
    let start = Collection::of_concept(&s, f);
    let whole = navigate::eval_path(&s, &start, &steps).unwrap();
    for split in 0..=steps.len() {
        let first = navigate::eval_path(&s, &start, &steps[..split]).unwrap();
        let second = navigate::eval_path(&s, &first, &steps[split..]).unwrap();
        assert_eq!(second, whole, "split at {split}");
    }
}

/// multi_project equals the intersection of single projections, computed
/// both ways.
#[test]
fn multi_project_matches_intersection() {
    for seed in 0..50u64 {
        let s = fixtures::random_model(seed ^ 0x3C);
        for cid in s.concept_ids() {
            let cdef = s.concept(cid);
            // dimension pairs sharing a domain
            for i in 0..cdef.dims.len() {
                for j in (i + 1)..cdef.dims.len() {
                    if cdef.dims[i].domain != cdef.dims[j].domain {
                        continue;
                    }
                    let dims = vec![cdef.dims[i].name.clone(), cdef.dims[j].name.clone()];
                    let coll = Collection::of_concept(&s, cid);
                    let multi = navigate::multi_project(&s, &coll, &dims).unwrap();
                    let a = navigate::project(&s, &coll, &DimPath(vec![dims[0].clone()])).unwrap();
                    let b = navigate::project(&s, &coll, &DimPath(vec![dims[1].clone()])).unwrap();
                    let expected: Vec<ItemRef> = a
                        .members
                        .iter()
                        .copied()
                        .filter(|m| b.contains(*m))
                        .collect();
                    assert_eq!(multi.members, expected, "seed {seed}");
                }
            }
        }
    }
}

/// Coverage is monotone along the specific-general relation whenever the
/// duplicate detector stays silent.
#[test]
fn coverage_monotone_on_random_models() {
    let mut usable = 0;
    for seed in 0..60u64 {
        let s = fixtures::random_model(seed ^ 0x77);
        let Ok(table) = flatten_default(&s) else { continue };
        if !table.duplicates.is_empty() {
            continue;
        }
        usable += 1;
        let items = all_items(&s);
        for &a in &items {
            for &b in &items {
                if table.item_leq(a, b) {
                    let ca: HashSet<usize> = table.coverage(a).into_iter().collect();
                    let cb: HashSet<usize> = table.coverage(b).into_iter().collect();
                    assert!(
                        ca.is_subset(&cb),
                        "seed {seed}: coverage not monotone for {} <= {}",
                        s.key_of(a),
                        s.key_of(b)
                    );
                }
            }
        }
    }
    assert!(usable > 20, "too few duplicate-free models: {usable}");
}

/// Full de-projection agrees with a direct scan of item_leq over the
/// bottom items.
#[test]
fn full_deproject_matches_item_leq_scan() {
    for seed in [3u64, 17, 40] {
        let s = fixtures::random_model(seed);
        let Ok(bottom) = s.bottom() else { continue };
        let Ok(table) = flatten_default(&s) else { continue };
        if !table.duplicates.is_empty() {
            continue;
        }
        for cid in s.concept_ids() {
            for item in s.items(cid) {
                let coll = Collection::new(cid, vec![item]);
                let got = navigate::full_deproject(&table, &coll).unwrap();
                let mut want: Vec<ItemRef> = s
                    .items(bottom)
                    .filter(|z| table.item_leq(*z, item))
                    .collect();
                want.sort();
                assert_eq!(got, want, "seed {seed}, item {}", s.key_of(item));
            }
        }
    }
}
