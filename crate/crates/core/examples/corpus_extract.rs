//! Extract a whole corpus in parallel and write the feature CSV.
//!
//! cargo run --release --example corpus_extract -- [corpus_root] [out.csv]
//!
//! Without arguments a small generated corpus is used.

use std::path::PathBuf;

use texpyr::dataset::{scan_corpus, FeatureTable};
use texpyr::pipeline::{extract_corpus, ExtractionConfig};
use texpyr::synth::{texture_classes, write_corpus};

fn main() -> texpyr::Result<()> {
    let mut args = std::env::args().skip(1);
    let tmp = tempfile::tempdir()?;
    let root = match args.next() {
        Some(p) => PathBuf::from(p),
        None => {
            write_corpus(tmp.path(), &texture_classes(), 8, 64, 0)?;
            tmp.path().to_path_buf()
        }
    };
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| tmp.path().join("features.csv"));

    let corpus = scan_corpus(&root)?;
    let config = ExtractionConfig::default();
    let t = std::time::Instant::now();
    let features = extract_corpus(&corpus.items, &config, 0)?;
    let mut table = FeatureTable::new(config.schema());
    for (item, v) in &features.rows {
        table.push(&item.label, v)?;
    }
    table.write_path(&out)?;
    println!(
        "{} images, {} classes, {} failures, {:.2} s -> {}",
        corpus.len(),
        corpus.classes.len(),
        features.failures.len(),
        t.elapsed().as_secs_f64(),
        out.display()
    );
    Ok(())
}
