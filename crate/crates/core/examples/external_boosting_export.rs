//! Write a feature CSV for an external gradient-boosting run.
//!
//! cargo run --release --example external_boosting_export -- out.csv
//! python3 scripts/external_boosting.py out.csv

use std::path::PathBuf;

use texpyr::dataset::{scan_corpus, FeatureTable};
use texpyr::pipeline::{extract_corpus, ExtractionConfig};
use texpyr::synth::{texture_classes, write_corpus};

fn main() -> texpyr::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("features.csv"));
    let dir = tempfile::tempdir()?;
    write_corpus(dir.path(), &texture_classes(), 10, 64, 3)?;
    let config = ExtractionConfig::default();
    let features = extract_corpus(&scan_corpus(dir.path())?.items, &config, 0)?;
    let mut table = FeatureTable::new(config.schema());
    for (item, v) in &features.rows {
        table.push(&item.label, v)?;
    }
    table.write_path(&out)?;
    println!("{} rows x {} columns -> {}", table.rows.len(), table.schema.total_dims() + 2, out.display());
    Ok(())
}
