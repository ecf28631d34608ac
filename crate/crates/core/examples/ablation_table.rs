//! Per-descriptor ablation on a generated corpus, LDA and 1-NN, five seeds.
//!
//! cargo run --release --example ablation_table -- [per_class] [size]

use texpyr::cli::{ablate, ClassifierKind, EvalOptions};
use texpyr::dataset::{scan_corpus, FeatureTable};
use texpyr::pipeline::{extract_corpus, ExtractionConfig};
use texpyr::synth::{texture_classes, write_corpus};

fn main() -> texpyr::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("numeric argument"));
    let per_class = args.next().unwrap_or(20);
    let size = args.next().unwrap_or(64);

    let dir = tempfile::tempdir()?;
    write_corpus(dir.path(), &texture_classes(), per_class, size, 1)?;
    let corpus = scan_corpus(dir.path())?;
    let config = ExtractionConfig::default();
    let features = extract_corpus(&corpus.items, &config, 0)?;
    let mut table = FeatureTable::new(config.schema());
    for (item, v) in &features.rows {
        table.push(&item.label, v)?;
    }

    let result = ablate(&table, &[ClassifierKind::Lda, ClassifierKind::Knn], 5, &EvalOptions::default())?;
    println!("{} images, {} classes\n", table.rows.len(), corpus.classes.len());
    print!("{}", result.to_markdown());
    Ok(())
}
