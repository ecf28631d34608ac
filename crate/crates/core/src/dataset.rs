//! Corpus ingestion, stratified splitting, min-max scaling and CSV persistence.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pipeline::{DescriptorSubset, FeatureSchema, FeatureVector};

const IMAGE_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CorpusItem {
    /// `<class>/<file name>`, unique within a corpus.
    pub source_id: String,
    pub label: String,
    pub path: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledCorpus {
    pub root: PathBuf,
    pub items: Vec<CorpusItem>,
    pub classes: Vec<String>,
}

impl LabeledCorpus {
    pub fn labels(&self) -> Vec<&str> {
        self.items.iter().map(|i| i.label.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

fn read_dir_sorted(path: &Path) -> Result<Vec<fs::DirEntry>> {
    let unreadable = |cause| Error::UnreadableDirectory {
        path: path.to_path_buf(),
        cause,
    };
    let mut entries = fs::read_dir(path)
        .map_err(unreadable)?
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(unreadable)?;
    entries.sort_by_key(|e| e.file_name());
    Ok(entries)
}

fn is_hidden(name: &str) -> bool {
    name.starts_with('.')
}

fn is_image_name(name: &str) -> bool {
    Path::new(name)
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.iter().any(|x| x.eq_ignore_ascii_case(e)))
}

/// Reads a `root/<class>/<image>` tree. Items come out in lexicographic
/// (class, file name) order; hidden entries and non-image files are skipped.
pub fn scan_corpus(root: &Path) -> Result<LabeledCorpus> {
    let mut items = Vec::new();
    let mut classes = Vec::new();
    for class_dir in read_dir_sorted(root)? {
        let class = class_dir.file_name().to_string_lossy().into_owned();
        if is_hidden(&class) || !class_dir.path().is_dir() {
            continue;
        }
        let before = items.len();
        for file in read_dir_sorted(&class_dir.path())? {
            let name = file.file_name().to_string_lossy().into_owned();
            if is_hidden(&name) || !is_image_name(&name) || !file.path().is_file() {
                continue;
            }
            items.push(CorpusItem {
                source_id: format!("{class}/{name}"),
                label: class.clone(),
                path: file.path(),
            });
        }
        if items.len() > before {
            classes.push(class);
        }
    }
    if items.is_empty() {
        return Err(Error::EmptyCorpus(root.to_path_buf()));
    }
    Ok(LabeledCorpus {
        root: root.to_path_buf(),
        items,
        classes,
    })
}

/// Train/test partition as indices into the original item list, each sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn group_by_label<S: AsRef<str>>(labels: &[S]) -> BTreeMap<&str, Vec<usize>> {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        groups.entry(l.as_ref()).or_default().push(i);
    }
    groups
}

/// Per-class shuffle with a ChaCha8 stream seeded by `seed`; each class
/// contributes `round(ratio * n)` items to train, clamped to `1..n`.
pub fn stratified_split<S: AsRef<str>>(labels: &[S], ratio: f64, seed: u64) -> Result<SplitIndices> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidRatio(ratio));
    }
    if labels.is_empty() {
        return Err(Error::EmptySet("corpus"));
    }
    let groups = group_by_label(labels);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = SplitIndices {
        train: Vec::new(),
        test: Vec::new(),
    };
    for (label, mut idx) in groups {
        let n = idx.len();
        if n < 2 {
            return Err(Error::ClassTooSmall {
                label: label.to_string(),
                count: n,
                required: 2,
            });
        }
        idx.shuffle(&mut rng);
        let n_train = ((ratio * n as f64).round() as usize).clamp(1, n - 1);
        split.train.extend_from_slice(&idx[..n_train]);
        split.test.extend_from_slice(&idx[n_train..]);
    }
    split.train.sort_unstable();
    split.test.sort_unstable();
    Ok(split)
}

/// Stratified k folds; fold `i` tests on every `k`-th shuffled member of each class.
pub fn stratified_kfold<S: AsRef<str>>(labels: &[S], k: usize, seed: u64) -> Result<Vec<SplitIndices>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k-fold needs k >= 2, got {k}")));
    }
    let groups = group_by_label(labels);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![
        SplitIndices {
            train: Vec::new(),
            test: Vec::new()
        };
        k
    ];
    for (label, mut idx) in groups {
        if idx.len() < k {
            return Err(Error::ClassTooSmall {
                label: label.to_string(),
                count: idx.len(),
                required: k,
            });
        }
        idx.shuffle(&mut rng);
        for (pos, &i) in idx.iter().enumerate() {
            for (f, fold) in folds.iter_mut().enumerate() {
                if pos % k == f {
                    fold.test.push(i);
                } else {
                    fold.train.push(i);
                }
            }
        }
    }
    for fold in &mut folds {
        fold.train.sort_unstable();
        fold.test.sort_unstable();
    }
    Ok(folds)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitCorpus {
    pub train: Vec<CorpusItem>,
    pub test: Vec<CorpusItem>,
    pub seed: u64,
    pub ratio: f64,
}

pub fn split(corpus: &LabeledCorpus, ratio: f64, seed: u64) -> Result<SplitCorpus> {
    let idx = stratified_split(&corpus.labels(), ratio, seed)?;
    let pick = |v: &[usize]| v.iter().map(|&i| corpus.items[i].clone()).collect();
    Ok(SplitCorpus {
        train: pick(&idx.train),
        test: pick(&idx.test),
        seed,
        ratio,
    })
}

/// Per-dimension range of the training vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct MinMaxStats {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

pub fn fit_minmax<V: AsRef<[f64]>>(train: &[V]) -> Result<MinMaxStats> {
    let first = train.first().ok_or(Error::EmptySet("training vectors"))?.as_ref();
    let mut stats = MinMaxStats {
        min: first.to_vec(),
        max: first.to_vec(),
    };
    for v in &train[1..] {
        let v = v.as_ref();
        if v.len() != stats.min.len() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", v.len(), stats.min.len())));
        }
        for ((lo, hi), &x) in stats.min.iter_mut().zip(stats.max.iter_mut()).zip(v) {
            *lo = lo.min(x);
            *hi = hi.max(x);
        }
    }
    Ok(stats)
}

/// `(v - min) / (max - min)`, 0 on constant dimensions. Values outside the
/// training range are not clipped.
pub fn apply_minmax(v: &[f64], stats: &MinMaxStats) -> Result<Vec<f64>> {
    if v.len() != stats.min.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", v.len(), stats.min.len())));
    }
    Ok(v.iter()
        .zip(stats.min.iter().zip(&stats.max))
        .map(|(&x, (&lo, &hi))| if hi > lo { (x - lo) / (hi - lo) } else { 0.0 })
        .collect())
}

impl MinMaxStats {
    pub fn dims(&self) -> usize {
        self.min.len()
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        apply_minmax(v, self)
    }

    pub fn apply_all<V: AsRef<[f64]>>(&self, rows: &[V]) -> Result<Vec<Vec<f64>>> {
        rows.iter().map(|r| self.apply(r.as_ref())).collect()
    }

    /// Writes `dim_name,min,max` rows.
    pub fn write_csv<W: Write, S: AsRef<str>>(&self, names: &[S], out: W) -> Result<()> {
        if names.len() != self.dims() {
            return Err(Error::DimensionMismatch(format!("{} names for {} dims", names.len(), self.dims())));
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["dim_name", "min", "max"])?;
        for ((name, lo), hi) in names.iter().zip(&self.min).zip(&self.max) {
            w.write_record([name.as_ref(), &lo.to_string(), &hi.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<(Vec<String>, Self)> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != ["dim_name", "min", "max"] {
            return Err(Error::SchemaMismatch(format!("stats header {header:?}")));
        }
        let (mut names, mut min, mut max) = (Vec::new(), Vec::new(), Vec::new());
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            names.push(rec[0].to_string());
            min.push(parse_f64(&rec[1], line + 2)?);
            max.push(parse_f64(&rec[2], line + 2)?);
        }
        Ok((names, Self { min, max }))
    }
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::SchemaMismatch(format!("line {line}: {s:?} is not a number")))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRow {
    pub source_id: String,
    pub label: String,
    pub values: Vec<f64>,
}

/// In-memory copy of a feature CSV: `source_id,label,<schema columns...>`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    pub schema: FeatureSchema,
    pub rows: Vec<FeatureRow>,
}

impl FeatureTable {
    pub fn new(schema: FeatureSchema) -> Self {
        Self { schema, rows: Vec::new() }
    }

    pub fn push(&mut self, label: &str, v: &FeatureVector) -> Result<()> {
        if v.len() != self.schema.total_dims() {
            return Err(Error::SchemaMismatch(format!(
                "{} has {} values, schema has {}",
                v.source_id,
                v.len(),
                self.schema.total_dims()
            )));
        }
        self.rows.push(FeatureRow {
            source_id: v.source_id.clone(),
            label: label.to_string(),
            values: v.values.clone(),
        });
        Ok(())
    }

    pub fn labels(&self) -> Vec<String> {
        self.rows.iter().map(|r| r.label.clone()).collect()
    }

    /// Feature matrix restricted to a descriptor subset.
    pub fn matrix(&self, subset: DescriptorSubset) -> Vec<Vec<f64>> {
        let idx = self.schema.subset_indices(subset);
        self.rows.iter().map(|r| idx.iter().map(|&i| r.values[i]).collect()).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let mut header = vec!["source_id".to_string(), "label".to_string()];
        header.extend(self.schema.column_names());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = Vec::with_capacity(row.values.len() + 2);
            rec.push(row.source_id.clone());
            rec.push(row.label.clone());
            rec.extend(row.values.iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header.len() < 3 || header[0] != "source_id" || header[1] != "label" {
            return Err(Error::SchemaMismatch(
                "feature CSV must start with source_id,label".into(),
            ));
        }
        let schema = FeatureSchema::from_columns(&header[2..])?;
        let mut table = Self::new(schema);
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| Error::SchemaMismatch(e.to_string()))?;
            let values = rec
                .iter()
                .skip(2)
                .map(|s| parse_f64(s, line + 2))
                .collect::<Result<Vec<_>>>()?;
            table.rows.push(FeatureRow {
                source_id: rec[0].to_string(),
                label: rec[1].to_string(),
                values,
            });
        }
        Ok(table)
    }

    pub fn write_path(&self, path: &Path) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(fs::File::create(path)?))
    }

    pub fn read_path(path: &Path) -> Result<Self> {
        Self::read_csv(std::io::BufReader::new(fs::File::open(path)?))
    }
}
