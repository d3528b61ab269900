//! Runs a suite through the library harness and writes its CSV rows to stdout.

use std::collections::BTreeMap;

use sublinear::harness::{run_suite, write_csv, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let map: BTreeMap<String, String> = [
        ("suite", "clt"),
        ("kind", "convex"),
        ("family", "f2"),
        ("phi", "abs"),
        ("n-list", "1,4,16"),
        ("seed", "1"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect();
    let cfg = ExperimentConfig::from_map(&map)?;
    let rows = run_suite(&cfg)?;
    write_csv(&rows, std::io::stdout().lock())?;
    Ok(())
}
