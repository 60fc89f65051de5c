//! The files under `fixtures/` are generated by `make_fixtures`; these
//! tests pin them to the in-code models so they cannot drift, and check
//! that the CSV bundle rebuilds the same model it was rendered from.

use std::path::{Path, PathBuf};

use comdb::fixtures;
use comdb::flatten::flatten_default;
use comdb::io::{self, schema_text, data_text, IngestMap};
use comdb::shell::Shell;

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

#[test]
fn committed_files_match_generated_models() {
    for (name, schema) in [
        ("flat1", fixtures::flat1()),
        ("nav1", fixtures::nav1()),
        ("inf1", fixtures::inf1()),
        ("olap1", fixtures::olap1()),
        ("group1", fixtures::group1()),
    ] {
        let schema_file = fixture_dir().join(format!("{name}.schema"));
        let data_file = fixture_dir().join(format!("{name}.data"));
        assert_eq!(
            std::fs::read_to_string(&schema_file).unwrap(),
            schema_text::render_schema(&schema),
            "{name}.schema is stale; run `cargo run --example make_fixtures`"
        );
        assert_eq!(
            std::fs::read_to_string(&data_file).unwrap(),
            data_text::render_data(&schema),
            "{name}.data is stale; run `cargo run --example make_fixtures`"
        );
    }
}

#[test]
fn csv_bundle_rebuilds_olap1() {
    let dir = fixture_dir();
    let mut ingested = io::load(&dir.join("olap1.schema"), None).unwrap();
    let map_text = std::fs::read_to_string(dir.join("olap1.toml")).unwrap();
    let map = IngestMap::parse_toml(&map_text).unwrap();
    let report = io::ingest_csv(&mut ingested, &map, &dir).unwrap();
    assert_eq!(report.total_rejected(), 0, "{report}");
    let built = fixtures::olap1();
    assert_eq!(ingested.total_items(), built.total_items());
    // ingest then flatten equals the hand-built fixture's flattening
    let t1 = flatten_default(&ingested).unwrap();
    let t2 = flatten_default(&built).unwrap();
    assert_eq!(t1.to_tsv(&ingested), t2.to_tsv(&built));
    // and the canonical save is byte-identical
    assert_eq!(data_text::render_data(&ingested), data_text::render_data(&built));
}

#[test]
fn demo_script_is_deterministic() {
    let script = std::fs::read_to_string(fixture_dir().join("demo.cq")).unwrap();
    let run = || {
        let mut shell = Shell::new();
        shell.base = fixture_dir();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let failures = shell.run_script(&script, &mut out, &mut err);
        assert_eq!(failures, 0, "{}", String::from_utf8_lossy(&err));
        out
    };
    assert_eq!(run(), run());
}
