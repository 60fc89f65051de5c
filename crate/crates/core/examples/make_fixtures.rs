//! Regenerates the bundled sample models under `fixtures/`.
//!
//! Usage: `cargo run --example make_fixtures [target-dir]`

use std::path::PathBuf;

use comdb::fixtures;
use comdb::io::{self, csv_ingest, IngestFile, IngestMap};

fn main() {
    let target: PathBuf = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| PathBuf::from("crates/core/fixtures"));
    std::fs::create_dir_all(&target).expect("create fixtures dir");

    for (name, schema) in [
        ("flat1", fixtures::flat1()),
        ("nav1", fixtures::nav1()),
        ("inf1", fixtures::inf1()),
        ("olap1", fixtures::olap1()),
        ("group1", fixtures::group1()),
    ] {
        io::save(
            &schema,
            &target.join(format!("{name}.schema")),
            &target.join(format!("{name}.data")),
        )
        .expect("save fixture");
        println!("wrote {name}.schema / {name}.data");
    }

    // The snowflake CSV bundle mirrors the olap1 model: ingesting the
    // CSVs into olap1.schema rebuilds the same items.
    let olap1 = fixtures::olap1();
    let map = olap1_ingest_map();
    for file in &map.files {
        let csv = csv_ingest::render_csv(&olap1, file);
        std::fs::write(target.join(&file.path), csv).expect("write csv");
        println!("wrote {}", file.path);
    }
    std::fs::write(target.join("olap1.toml"), map.to_toml()).expect("write ingest map");
    println!("wrote olap1.toml");

    let demo = "\
# comdb demo script: flatten the sample model, navigate, constrain and infer.
load flat1.schema flat1.data
stats Z
flatten --tsv
project Z x
deproject V v X
constrain V 'this != 3'
propagate --down
query --tsv 'FROM X x SELECT x'
quit
";
    std::fs::write(target.join("demo.cq"), demo).expect("write demo script");
    println!("wrote demo.cq");
}

/// Column mappings for the olap1 CSV bundle, in dependency order.
pub fn olap1_ingest_map() -> IngestMap {
    let file = |path: &str, concept: &str, key: &str, columns: &[(&str, &str)]| IngestFile {
        path: path.to_string(),
        concept: concept.to_string(),
        key: key.to_string(),
        columns: columns
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
    };
    IngestMap {
        files: vec![
            file("countries.csv", "Countries", "code", &[("code", "code")]),
            file("categories.csv", "Categories", "id", &[("id", "id")]),
            file(
                "customers.csv",
                "Customers",
                "id",
                &[("name", "name"), ("country", "country")],
            ),
            file(
                "orders.csv",
                "Orders",
                "id",
                &[("customer", "customer"), ("date", "date")],
            ),
            file(
                "products.csv",
                "Products",
                "id",
                &[("name", "name"), ("category", "category")],
            ),
            file(
                "orderparts.csv",
                "OrderParts",
                "id",
                &[
                    ("order", "order"),
                    ("product", "product"),
                    ("price", "price"),
                    ("qty", "qty"),
                ],
            ),
        ],
    }
}
