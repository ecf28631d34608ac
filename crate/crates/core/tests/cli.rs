use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use texpyr::cli::{EvalRecord, RunManifest};
use texpyr::dataset::FeatureTable;
use texpyr::synth::{texture_classes, write_corpus};

fn texpyr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_texpyr"))
        .args(args)
        .env_remove("TEXPYR_SEED")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Two well separated classes, `n` images each.
fn two_class_corpus(root: &Path, n: usize) {
    let classes: Vec<_> = texture_classes()
        .into_iter()
        .filter(|c| c.name == "blobs_large" || c.name == "grating_p04")
        .collect();
    write_corpus(root, &classes, n, 32, 5).unwrap();
}

fn toy_corpus(root: &Path) {
    let classes = texture_classes();
    write_corpus(root, &classes[..1], 3, 24, 1).unwrap();
    write_corpus(root, &classes[2..3], 2, 24, 1).unwrap();
}

fn extract(corpus: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["extract", s(corpus), "--out", s(out)];
    args.extend_from_slice(extra);
    texpyr(&args)
}

#[test]
fn extract_toy_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    toy_corpus(&corpus);
    let out = dir.path().join("features.csv");
    let res = extract(&corpus, &out, &["--jobs", "2"]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));

    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines.iter().all(|l| l.split(',').count() == 317));
    assert!(lines[0].starts_with("source_id,label,bit_L0_R_margalef"));
    assert!(lines[1].starts_with("blobs_large/000.png,blobs_large,"));

    let manifests = RunManifest::read_all(&dir.path().join("texpyr-manifest.jsonl")).unwrap();
    assert_eq!(manifests.len(), 1);
    assert_eq!(manifests[0].command, "extract");
    assert_eq!(manifests[0].exit_code, 0);
    assert!(manifests[0].errors.is_empty());
    assert_eq!(manifests[0].schema_version, "tio-v1");
}

#[test]
fn corrupt_file_is_reported_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    toy_corpus(&corpus);
    fs::write(corpus.join("checker_4/001.png"), b"not a png").unwrap();
    let out = dir.path().join("features.csv");
    let manifest = dir.path().join("runs.jsonl");
    let res = extract(&corpus, &out, &["--manifest", s(&manifest)]);
    assert_eq!(res.status.code(), Some(1));
    assert_eq!(FeatureTable::read_path(&out).unwrap().rows.len(), 4);
    let m = RunManifest::read_all(&manifest).unwrap();
    assert_eq!(m.len(), 1);
    assert_eq!(m[0].errors.len(), 1);
    assert_eq!(m[0].errors[0].source_id, "checker_4/001.png");
}

#[test]
fn empty_or_missing_corpus_is_unusable() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let out = dir.path().join("f.csv");
    assert_eq!(extract(&empty, &out, &[]).status.code(), Some(2));
    assert_eq!(extract(&dir.path().join("missing"), &out, &[]).status.code(), Some(2));
    // both attempts still leave a manifest line
    assert_eq!(RunManifest::read_all(&dir.path().join("texpyr-manifest.jsonl")).unwrap().len(), 2);
}

#[test]
fn extraction_is_reproducible_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    toy_corpus(&corpus);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert_eq!(extract(&corpus, &a, &["--jobs", "1"]).status.code(), Some(0));
    assert_eq!(extract(&corpus, &b, &["--jobs", "4"]).status.code(), Some(0));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn level_and_quantization_flags_change_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    toy_corpus(&corpus);
    let out = dir.path().join("f.csv");
    let dump = dir.path().join("levels");
    let res = extract(&corpus, &out, &["--levels", "2", "--glcm-levels", "16", "--dump-levels", s(&dump)]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let table = FeatureTable::read_path(&out).unwrap();
    assert_eq!(table.schema.total_dims(), 210);
    assert!(dump.join("checker_4/000_L1.png").is_file());
    assert!(!dump.join("checker_4/000_L2.png").exists());
}

#[test]
fn config_file_feeds_extraction() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    toy_corpus(&corpus);
    let cfg = dir.path().join("texpyr.conf");
    fs::write(&cfg, "levels = 1\n").unwrap();
    let out = dir.path().join("f.csv");
    assert_eq!(extract(&corpus, &out, &["--config", s(&cfg)]).status.code(), Some(0));
    assert_eq!(FeatureTable::read_path(&out).unwrap().schema.total_dims(), 105);
    // the flag wins over the file
    assert_eq!(extract(&corpus, &out, &["--config", s(&cfg), "--levels", "3"]).status.code(), Some(0));
    assert_eq!(FeatureTable::read_path(&out).unwrap().schema.total_dims(), 315);

    fs::write(&cfg, "pyramid_depth = 2\n").unwrap();
    assert_eq!(extract(&corpus, &out, &["--config", s(&cfg)]).status.code(), Some(2));
}

fn separable_features(dir: &Path) -> PathBuf {
    let corpus = dir.join("corpus");
    two_class_corpus(&corpus, 10);
    let out = dir.join("features.csv");
    assert_eq!(extract(&corpus, &out, &[]).status.code(), Some(0));
    out
}

#[test]
fn train_eval_separable_with_both_classifiers() {
    let dir = tempfile::tempdir().unwrap();
    let features = separable_features(dir.path());
    let mut records = Vec::new();
    for classifier in ["lda", "knn"] {
        let json = dir.path().join(format!("{classifier}.json"));
        let res = texpyr(&[
            "train-eval",
            s(&features),
            "--classifier",
            classifier,
            "--seed",
            "4",
            "--report-json",
            s(&json),
        ]);
        assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
        let stdout = String::from_utf8_lossy(&res.stdout);
        assert!(stdout.contains("| TiO | 315 |"), "{stdout}");
        let rec: EvalRecord = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
        assert_eq!(rec.report.accuracy, 1.0);
        assert_eq!(rec.report.total(), 6);
        records.push(json);
    }

    let res = texpyr(&["report", s(&records[0]), s(&records[1])]);
    assert_eq!(res.status.code(), Some(0));
    let table = String::from_utf8_lossy(&res.stdout);
    assert!(table.contains("| Descriptor | LDA (%) | kNN (%) |"), "{table}");
    assert!(table.contains("| TiO | 100.00 | 100.00 |"), "{table}");
}

#[test]
fn train_eval_writes_model_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let features = separable_features(dir.path());
    let model = dir.path().join("model.json");
    let stats = dir.path().join("stats.csv");
    let res = texpyr(&[
        "train-eval",
        s(&features),
        "--descriptor-subset",
        "bit",
        "--model-out",
        s(&model),
        "--stats-out",
        s(&stats),
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let m = texpyr::classify::LdaModel::read_json(fs::File::open(&model).unwrap()).unwrap();
    assert_eq!(m.dims(), 126);
    let (names, st) = texpyr::dataset::MinMaxStats::read_csv(fs::File::open(&stats).unwrap()).unwrap();
    assert_eq!(names[0], "bit_L0_R_margalef");
    assert_eq!(st.dims(), 126);
}

#[test]
fn schema_mismatch_and_degenerate_classes_are_unusable() {
    let dir = tempfile::tempdir().unwrap();
    let features = separable_features(dir.path());
    let text = fs::read_to_string(&features).unwrap();

    let renamed = dir.path().join("renamed.csv");
    fs::write(&renamed, text.replacen("bit_L0_R_margalef", "bit_L0_R_richness", 1)).unwrap();
    assert_eq!(texpyr(&["train-eval", s(&renamed)]).status.code(), Some(2));

    let one_class = dir.path().join("one_class.csv");
    let kept: Vec<_> = text.lines().filter(|l| !l.contains(",grating_p04,")).collect();
    fs::write(&one_class, kept.join("\n")).unwrap();
    for classifier in ["lda", "knn"] {
        assert_eq!(texpyr(&["train-eval", s(&one_class), "--classifier", classifier]).status.code(), Some(2));
    }

    assert_eq!(texpyr(&["train-eval", s(&features), "--ratio", "1.0"]).status.code(), Some(2));
    assert_eq!(texpyr(&["train-eval", s(&features), "--classifier", "svm"]).status.code(), Some(2));
}

#[test]
fn ablate_emits_five_rows_per_classifier() {
    let dir = tempfile::tempdir().unwrap();
    let features = separable_features(dir.path());
    let out = dir.path().join("ablation.csv");
    let res = texpyr(&[
        "ablate",
        s(&features),
        "--classifier",
        "lda,knn",
        "--seeds",
        "2",
        "--format",
        "csv",
        "--out",
        s(&out),
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "descriptor,dims,lda_mean,lda_std,knn_mean,knn_std");
    let dims: Vec<_> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(dims, ["315", "126", "54", "117", "18"]);
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    two_class_corpus(&corpus, 10);
    let run = |out: &Path, seed_flag: Option<&str>, env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_texpyr"));
        cmd.args(["split", s(&corpus), "--out", s(out)]).env_remove("TEXPYR_SEED");
        if let Some(seed) = seed_flag {
            cmd.args(["--seed", seed]);
        }
        if let Some(v) = env {
            cmd.env("TEXPYR_SEED", v);
        }
        assert_eq!(cmd.status().unwrap().code(), Some(0));
        fs::read_to_string(out).unwrap()
    };
    let flag = run(&dir.path().join("a.csv"), Some("17"), None);
    let env = run(&dir.path().join("b.csv"), None, Some("17"));
    let other = run(&dir.path().join("c.csv"), None, Some("18"));
    let both = run(&dir.path().join("d.csv"), Some("18"), Some("17"));
    assert_eq!(flag, env);
    assert_ne!(flag, other);
    assert_eq!(both, other);
    assert_eq!(flag.lines().filter(|l| l.ends_with(",train")).count(), 14);
    assert_eq!(flag.lines().filter(|l| l.ends_with(",test")).count(), 6);
}

#[test]
fn split_matches_train_eval_partition() {
    // train-eval on extracted rows sees the labels in the same order as the corpus scan
    let dir = tempfile::tempdir().unwrap();
    let features = separable_features(dir.path());
    let split_csv = dir.path().join("split.csv");
    let res = texpyr(&["split", s(&dir.path().join("corpus")), "--out", s(&split_csv), "--seed", "3"]);
    assert_eq!(res.status.code(), Some(0));
    let table = FeatureTable::read_path(&features).unwrap();
    let idx = texpyr::dataset::stratified_split(&table.labels(), 0.7, 3).unwrap();
    let train: Vec<_> = idx.train.iter().map(|&i| table.rows[i].source_id.clone()).collect();
    let listed: Vec<_> = fs::read_to_string(&split_csv)
        .unwrap()
        .lines()
        .filter(|l| l.ends_with(",train"))
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    assert_eq!(train, listed);
}

#[test]
fn help_and_bad_flags() {
    assert_eq!(texpyr(&["--help"]).status.code(), Some(0));
    assert_eq!(texpyr(&["extract"]).status.code(), Some(2));
    assert_eq!(texpyr(&["train-eval", "x.csv", "--descriptor-subset", "lbp"]).status.code(), Some(2));
}
