//! Split, normalize, fit LDA and print the confusion matrix; the model
//! survives a JSON round trip unchanged.

use texpyr::classify::{Classifier, LdaModel};
use texpyr::cli::{train_eval, EvalOptions};
use texpyr::dataset::{scan_corpus, FeatureTable};
use texpyr::pipeline::{extract_corpus, ExtractionConfig};
use texpyr::synth::{texture_classes, write_corpus};

fn main() -> texpyr::Result<()> {
    let dir = tempfile::tempdir()?;
    write_corpus(dir.path(), &texture_classes(), 12, 64, 7)?;
    let config = ExtractionConfig::default();
    let features = extract_corpus(&scan_corpus(dir.path())?.items, &config, 0)?;
    let mut table = FeatureTable::new(config.schema());
    for (item, v) in &features.rows {
        table.push(&item.label, v)?;
    }

    let out = train_eval(&table, &EvalOptions::default())?;
    let r = &out.report;
    println!("accuracy {:.2}% ({}/{})", 100.0 * r.accuracy, r.correct(), r.total());
    for (label, row) in r.labels.iter().zip(&r.confusion) {
        println!("  {label:<18} {row:?}");
    }

    let model = out.model.expect("LDA run");
    let mut json = Vec::new();
    model.write_json(&mut json)?;
    let back = LdaModel::read_json(json.as_slice())?;
    println!("model JSON: {} bytes, round trip equal: {}", json.len(), back == model);
    println!("classes: {:?}", back.classes());
    Ok(())
}
