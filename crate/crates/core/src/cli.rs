//! Command-line front end: `extract`, `split`, `train-eval`, `ablate` and `report`.
//!
//! Settings resolve as command-line flag, then config file, then built-in
//! default. The seed additionally falls back to `TEXPYR_SEED` before the
//! config file is consulted. Exit codes: 0 clean run, 1 some images failed,
//! 2 unusable input.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::classify::{evaluate, lda_fit, Classifier, EvalReport, KnnModel, LdaModel, SplitDescriptor, DEFAULT_SHRINKAGE};
use crate::dataset::{fit_minmax, scan_corpus, split, stratified_split, FeatureTable, MinMaxStats};
use crate::error::{Error, Result};
use crate::imagecore::{decode_image, merge_channels};
use crate::pipeline::{color_pyramid, extract_corpus, DescriptorSubset, ExtractionConfig, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_UNUSABLE: i32 = 2;

pub const SEED_ENV: &str = "TEXPYR_SEED";
const MANIFEST_FILE: &str = "texpyr-manifest.jsonl";

#[derive(Parser, Debug)]
#[command(name = "texpyr", version, about = "Multiscale colour texture descriptors and classifiers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Extract one feature row per image of a `root/<class>/<image>` corpus.
    Extract(ExtractArgs),
    /// Write a stratified train/test assignment for a corpus.
    Split(SplitArgs),
    /// Split, normalize, fit and evaluate on a feature CSV.
    TrainEval(TrainEvalArgs),
    /// Evaluate every descriptor subset with one or more classifiers over several seeds.
    Ablate(AblateArgs),
    /// Tabulate evaluation JSON files as descriptor x classifier.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Lda,
    Knn,
}

impl ClassifierKind {
    pub fn display_name(self) -> &'static str {
        match self {
            Self::Lda => "LDA",
            Self::Knn => "kNN",
        }
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        <Self as ValueEnum>::from_str(s, true).map_err(|_| Error::InvalidParameter(format!("unknown classifier {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Markdown,
    Csv,
}

const SUBSET_NAMES: [&str; 5] = ["tio", "bit", "glcm", "haralick", "info"];

/// Flags shared by every subcommand.
#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// JSON-lines file the run manifest is appended to.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct ExtractionFlags {
    /// Number of Gaussian pyramid levels.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Gray levels used for co-occurrence matrices.
    #[arg(long)]
    pub glcm_levels: Option<usize>,
    /// Pixel distance of co-occurrence pairs.
    #[arg(long)]
    pub glcm_distance: Option<u32>,
    /// Worker threads, 0 for all cores.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct EvalFlags {
    /// Training fraction per class, strictly between 0 and 1.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Split seed. Falls back to TEXPYR_SEED.
    #[arg(long, env = SEED_ENV)]
    pub seed: Option<u64>,
    /// LDA covariance shrinkage in [0, 1].
    #[arg(long)]
    pub shrinkage: Option<f64>,
    /// Neighbours for the k-NN classifier.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    /// Corpus root.
    pub corpus: PathBuf,
    /// Output feature CSV.
    #[arg(short, long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub extraction: ExtractionFlags,
    /// Also write every RGB pyramid level as PNG under this directory.
    #[arg(long)]
    pub dump_levels: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    pub corpus: PathBuf,
    /// Output CSV with `source_id,label,partition` rows.
    #[arg(short, long)]
    pub out: PathBuf,
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long, env = SEED_ENV)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct TrainEvalArgs {
    pub features: PathBuf,
    #[command(flatten)]
    pub eval: EvalFlags,
    #[arg(long, value_enum)]
    pub classifier: Option<ClassifierKind>,
    #[arg(long, value_parser = SUBSET_NAMES)]
    pub descriptor_subset: Option<String>,
    /// Write the fitted LDA model as JSON.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    /// Write the training min/max statistics as CSV.
    #[arg(long)]
    pub stats_out: Option<PathBuf>,
    /// Write the evaluation record as JSON (input for `report`).
    #[arg(long)]
    pub report_json: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct AblateArgs {
    pub features: PathBuf,
    #[command(flatten)]
    pub eval: EvalFlags,
    /// Classifiers to compare; repeat or comma-separate.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub classifier: Vec<ClassifierKind>,
    /// Number of consecutive seeds starting at --seed.
    #[arg(long)]
    pub seeds: Option<usize>,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: TableFormat,
    /// Write the table here instead of stdout.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Evaluation JSON files written by `train-eval --report-json`.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: TableFormat,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Fully resolved settings of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub levels: usize,
    pub glcm_levels: usize,
    pub glcm_distance: u32,
    pub jobs: usize,
    pub ratio: f64,
    pub seed: u64,
    pub shrinkage: f64,
    pub classifier: ClassifierKind,
    pub descriptor_subset: DescriptorSubset,
    pub k: usize,
    pub seeds: usize,
}

impl Default for Settings {
    fn default() -> Self {
        let e = ExtractionConfig::default();
        Self {
            levels: e.pyramid_levels,
            glcm_levels: e.glcm_levels,
            glcm_distance: e.glcm_distance,
            jobs: 0,
            ratio: 0.7,
            seed: 0,
            shrinkage: DEFAULT_SHRINKAGE,
            classifier: ClassifierKind::Lda,
            descriptor_subset: DescriptorSubset::Tio,
            k: 1,
            seeds: 5,
        }
    }
}

impl Settings {
    pub fn extraction(&self) -> ExtractionConfig {
        ExtractionConfig {
            glcm_levels: self.glcm_levels,
            glcm_distance: self.glcm_distance,
            pyramid_levels: self.levels,
            schema_version: SCHEMA_VERSION.to_string(),
        }
    }

    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            subset: self.descriptor_subset,
            classifier: self.classifier,
            ratio: self.ratio,
            seed: self.seed,
            shrinkage: self.shrinkage,
            k: self.k,
        }
    }

    /// Applies one `key = value` pair; dashes and underscores are interchangeable in keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("config {key}: cannot parse {value:?}")))
        }
        match key.replace('-', "_").as_str() {
            "levels" => self.levels = parse(key, value)?,
            "glcm_levels" => self.glcm_levels = parse(key, value)?,
            "glcm_distance" => self.glcm_distance = parse(key, value)?,
            "jobs" => self.jobs = parse(key, value)?,
            "ratio" => self.ratio = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "shrinkage" => self.shrinkage = parse(key, value)?,
            "classifier" => self.classifier = value.parse()?,
            "descriptor_subset" => self.descriptor_subset = value.parse()?,
            "k" => self.k = parse(key, value)?,
            "seeds" => self.seeds = parse(key, value)?,
            _ => return Err(Error::InvalidParameter(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Defaults overridden by a config file, if any.
    pub fn from_config(path: Option<&Path>) -> Result<Self> {
        let mut s = Self::default();
        if let Some(path) = path {
            let text = fs::read_to_string(path)?;
            for (n, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidParameter(format!("{}:{}: expected key = value", path.display(), n + 1)))?;
                s.set(k.trim(), v.trim())?;
            }
        }
        Ok(s)
    }

    fn apply_extraction(&mut self, f: &ExtractionFlags) {
        if let Some(v) = f.levels {
            self.levels = v;
        }
        if let Some(v) = f.glcm_levels {
            self.glcm_levels = v;
        }
        if let Some(v) = f.glcm_distance {
            self.glcm_distance = v;
        }
        if let Some(v) = f.jobs {
            self.jobs = v;
        }
    }

    fn apply_eval(&mut self, f: &EvalFlags) {
        if let Some(v) = f.ratio {
            self.ratio = v;
        }
        if let Some(v) = f.seed {
            self.seed = v;
        }
        if let Some(v) = f.shrinkage {
            self.shrinkage = v;
        }
        if let Some(v) = f.k {
            self.k = v;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageFailure {
    pub source_id: String,
    pub message: String,
}

/// One line of the append-only run log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Settings,
    pub seed: u64,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub schema_version: String,
    /// Seconds per phase.
    pub timings: BTreeMap<String, f64>,
    pub errors: Vec<ImageFailure>,
    pub exit_code: i32,
}

impl RunManifest {
    fn new(command: &str, config: &Settings) -> Self {
        Self {
            command: command.to_string(),
            config: config.clone(),
            seed: config.seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
            schema_version: SCHEMA_VERSION.to_string(),
            timings: BTreeMap::new(),
            errors: Vec::new(),
            exit_code: EXIT_OK,
        }
    }

    fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.timings.insert(phase.to_string(), t.elapsed().as_secs_f64());
        out
    }

    pub fn append_to(&self, path: &Path) -> Result<()> {
        let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
        let line = serde_json::to_string(self).map_err(|e| Error::ModelFormat(e.to_string()))?;
        writeln!(f, "{line}")?;
        Ok(())
    }

    pub fn read_all(path: &Path) -> Result<Vec<Self>> {
        fs::read_to_string(path)?
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| Error::ModelFormat(e.to_string())))
            .collect()
    }
}

/// Parameters of a single train/evaluate run on a feature table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub subset: DescriptorSubset,
    pub classifier: ClassifierKind,
    pub ratio: f64,
    pub seed: u64,
    pub shrinkage: f64,
    pub k: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Settings::default().eval_options()
    }
}

pub struct EvalOutcome {
    pub report: EvalReport,
    pub stats: MinMaxStats,
    pub column_names: Vec<String>,
    /// Present when the classifier is LDA.
    pub model: Option<LdaModel>,
}

/// Stratified split, min-max fit on the training part, normalization of both
/// parts, classifier fit and evaluation on the held-out part.
pub fn train_eval(table: &FeatureTable, opts: &EvalOptions) -> Result<EvalOutcome> {
    if table.rows.is_empty() {
        return Err(Error::EmptySet("feature table"));
    }
    let labels = table.labels();
    let idx = stratified_split(&labels, opts.ratio, opts.seed)?;
    let x = table.matrix(opts.subset);
    let pick = |ids: &[usize]| -> (Vec<Vec<f64>>, Vec<&str>) {
        ids.iter().map(|&i| (x[i].clone(), labels[i].as_str())).unzip()
    };
    let (train_x, train_y) = pick(&idx.train);
    let (test_x, test_y) = pick(&idx.test);
    let stats = fit_minmax(&train_x)?;
    let train_x = stats.apply_all(&train_x)?;
    let test_x = stats.apply_all(&test_x)?;
    let split = Some(SplitDescriptor {
        seed: opts.seed,
        ratio: opts.ratio,
    });
    let names = table.schema.column_names();
    let column_names = table.schema.subset_indices(opts.subset).into_iter().map(|i| names[i].clone()).collect();
    let (report, model) = match opts.classifier {
        ClassifierKind::Lda => {
            let m = lda_fit(&train_x, &train_y, opts.shrinkage)?;
            (evaluate(&m, &test_x, &test_y, split)?, Some(m))
        }
        ClassifierKind::Knn => {
            if train_y.iter().collect::<std::collections::BTreeSet<_>>().len() < 2 {
                return Err(Error::DegenerateClass("at least two classes are required".into()));
            }
            let m = KnnModel::fit(&train_x, &train_y, opts.k)?;
            (evaluate(&m as &dyn Classifier, &test_x, &test_y, split)?, None)
        }
    };
    Ok(EvalOutcome {
        report,
        stats,
        column_names,
        model,
    })
}

/// Evaluation result tagged with what produced it; the unit `report` tabulates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub descriptor: DescriptorSubset,
    pub classifier: ClassifierKind,
    pub dims: usize,
    pub options: EvalOptions,
    pub report: EvalReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationCell {
    pub classifier: ClassifierKind,
    /// Accuracy per seed, in seed order.
    pub accuracies: Vec<f64>,
}

impl AblationCell {
    pub fn mean(&self) -> f64 {
        self.accuracies.iter().sum::<f64>() / self.accuracies.len() as f64
    }

    pub fn std(&self) -> f64 {
        let m = self.mean();
        let n = self.accuracies.len() as f64;
        (self.accuracies.iter().map(|a| (a - m).powi(2)).sum::<f64>() / n).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub descriptor: DescriptorSubset,
    pub dims: usize,
    pub cells: Vec<AblationCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationTable {
    pub classifiers: Vec<ClassifierKind>,
    pub seeds: Vec<u64>,
    pub rows: Vec<AblationRow>,
}

/// Runs [`train_eval`] for every descriptor subset, classifier and seed
/// `base.seed .. base.seed + n_seeds`.
pub fn ablate(table: &FeatureTable, classifiers: &[ClassifierKind], n_seeds: usize, base: &EvalOptions) -> Result<AblationTable> {
    if classifiers.is_empty() || n_seeds == 0 {
        return Err(Error::InvalidParameter("ablation needs a classifier and at least one seed".into()));
    }
    let seeds: Vec<u64> = (0..n_seeds as u64).map(|i| base.seed.wrapping_add(i)).collect();
    let mut rows = Vec::new();
    for subset in DescriptorSubset::ALL {
        let mut cells = Vec::new();
        for &classifier in classifiers {
            let mut accuracies = Vec::new();
            for &seed in &seeds {
                let opts = EvalOptions {
                    subset,
                    classifier,
                    seed,
                    ..*base
                };
                accuracies.push(train_eval(table, &opts)?.report.accuracy);
            }
            cells.push(AblationCell { classifier, accuracies });
        }
        rows.push(AblationRow {
            descriptor: subset,
            dims: table.schema.subset_indices(subset).len(),
            cells,
        });
    }
    Ok(AblationTable {
        classifiers: classifiers.to_vec(),
        seeds,
        rows,
    })
}

impl AblationTable {
    pub fn row(&self, subset: DescriptorSubset) -> Option<&AblationRow> {
        self.rows.iter().find(|r| r.descriptor == subset)
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from("| Descriptor | Dims |");
        for c in &self.classifiers {
            let _ = write!(s, " {} (%) |", c.display_name());
        }
        s.push_str("\n|---|---:|");
        s.push_str(&"---:|".repeat(self.classifiers.len()));
        s.push('\n');
        for r in &self.rows {
            let _ = write!(s, "| {} | {} |", r.descriptor.display_name(), r.dims);
            for c in &r.cells {
                let _ = write!(s, " {:.2} ± {:.2} |", 100.0 * c.mean(), 100.0 * c.std());
            }
            s.push('\n');
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("descriptor,dims");
        for c in &self.classifiers {
            let name = c.display_name().to_lowercase();
            let _ = write!(s, ",{name}_mean,{name}_std");
        }
        s.push('\n');
        for r in &self.rows {
            let _ = write!(s, "{},{}", r.descriptor.as_str(), r.dims);
            for c in &r.cells {
                let _ = write!(s, ",{},{}", c.mean(), c.std());
            }
            s.push('\n');
        }
        s
    }
}

/// Mean accuracy per (descriptor, classifier) over all records, descriptors in canonical order.
pub fn report_table(records: &[EvalRecord], format: TableFormat) -> String {
    let mut classifiers: Vec<ClassifierKind> = records.iter().map(|r| r.classifier).collect();
    classifiers.sort_by_key(|c| *c as u8);
    classifiers.dedup();
    let cell = |d: DescriptorSubset, c: ClassifierKind| {
        let acc: Vec<f64> = records
            .iter()
            .filter(|r| r.descriptor == d && r.classifier == c)
            .map(|r| r.report.accuracy)
            .collect();
        (!acc.is_empty()).then(|| (acc.iter().sum::<f64>() / acc.len() as f64, acc.len()))
    };
    let present: Vec<DescriptorSubset> = DescriptorSubset::ALL
        .into_iter()
        .filter(|&d| records.iter().any(|r| r.descriptor == d))
        .collect();
    let mut s = String::new();
    match format {
        TableFormat::Markdown => {
            s.push_str("| Descriptor |");
            for c in &classifiers {
                let _ = write!(s, " {} (%) |", c.display_name());
            }
            s.push_str("\n|---|");
            s.push_str(&"---:|".repeat(classifiers.len()));
            s.push('\n');
            for d in present {
                let _ = write!(s, "| {} |", d.display_name());
                for &c in &classifiers {
                    match cell(d, c) {
                        Some((m, 1)) => {
                            let _ = write!(s, " {:.2} |", 100.0 * m);
                        }
                        Some((m, n)) => {
                            let _ = write!(s, " {:.2} (n={n}) |", 100.0 * m);
                        }
                        None => s.push_str(" - |"),
                    }
                }
                s.push('\n');
            }
        }
        TableFormat::Csv => {
            s.push_str("descriptor,classifier,runs,mean_accuracy\n");
            for d in present {
                for &c in &classifiers {
                    if let Some((m, n)) = cell(d, c) {
                        let _ = writeln!(s, "{},{},{n},{m}", d.as_str(), c.display_name().to_lowercase());
                    }
                }
            }
        }
    }
    s
}

fn manifest_path(explicit: Option<&PathBuf>, anchor: &Path) -> PathBuf {
    explicit.cloned().unwrap_or_else(|| {
        let dir = anchor.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        dir.join(MANIFEST_FILE)
    })
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn cmd_extract(args: &ExtractArgs, m: &mut RunManifest) -> Result<i32> {
    let config = m.config.extraction();
    config.validate()?;
    m.inputs.push(display(&args.corpus));
    let corpus = m.time("scan", || scan_corpus(&args.corpus))?;
    let jobs = m.config.jobs;
    let features = m.time("extract", || extract_corpus(&corpus.items, &config, jobs))?;
    m.errors = features
        .failures
        .iter()
        .map(|(source_id, message)| ImageFailure {
            source_id: source_id.clone(),
            message: message.clone(),
        })
        .collect();
    let mut table = FeatureTable::new(config.schema());
    for (item, v) in &features.rows {
        table.push(&item.label, v)?;
    }
    m.time("write", || table.write_path(&args.out))?;
    m.outputs.push(display(&args.out));
    if let Some(dir) = &args.dump_levels {
        for (item, _) in &features.rows {
            let img = decode_image(&fs::read(&item.path)?)?;
            let stem = item.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let out_dir = dir.join(&item.label);
            fs::create_dir_all(&out_dir)?;
            for (l, level) in color_pyramid(&img, config.pyramid_levels)?.into_iter().enumerate() {
                let png = merge_channels(&level.r, &level.g, &level.b)?.to_png()?;
                fs::write(out_dir.join(format!("{stem}_L{l}.png")), png)?;
            }
        }
        m.outputs.push(display(dir));
    }
    for f in &m.errors {
        eprintln!("failed: {}: {}", f.source_id, f.message);
    }
    eprintln!(
        "extracted {} of {} images ({} columns) into {}",
        table.rows.len(),
        corpus.len(),
        table.schema.total_dims() + 2,
        args.out.display()
    );
    Ok(match (table.rows.is_empty(), m.errors.is_empty()) {
        (true, _) => EXIT_UNUSABLE,
        (false, true) => EXIT_OK,
        (false, false) => EXIT_PARTIAL,
    })
}

fn cmd_split(args: &SplitArgs, m: &mut RunManifest) -> Result<i32> {
    m.inputs.push(display(&args.corpus));
    let corpus = scan_corpus(&args.corpus)?;
    let s = split(&corpus, m.config.ratio, m.config.seed)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&args.out)?;
    w.write_record(["source_id", "label", "partition"])?;
    let mut rows: Vec<_> = s
        .train
        .iter()
        .map(|i| (i, "train"))
        .chain(s.test.iter().map(|i| (i, "test")))
        .collect();
    rows.sort_by(|a, b| a.0.source_id.cmp(&b.0.source_id));
    for (item, part) in rows {
        w.write_record([item.source_id.as_str(), item.label.as_str(), part])?;
    }
    w.flush()?;
    m.outputs.push(display(&args.out));
    eprintln!("{} train / {} test", s.train.len(), s.test.len());
    Ok(EXIT_OK)
}

fn table_row(subset: DescriptorSubset, dims: usize, classifier: ClassifierKind, report: &EvalReport) -> String {
    format!(
        "| {} | {} | {} | {:.2} | {}/{} |",
        subset.display_name(),
        dims,
        classifier.display_name(),
        100.0 * report.accuracy,
        report.correct(),
        report.total()
    )
}

fn cmd_train_eval(args: &TrainEvalArgs, m: &mut RunManifest) -> Result<i32> {
    m.inputs.push(display(&args.features));
    let table = m.time("read", || FeatureTable::read_path(&args.features))?;
    let opts = m.config.eval_options();
    let out = m.time("train_eval", || train_eval(&table, &opts))?;
    let dims = out.column_names.len();
    println!("| Descriptor | Dims | Classifier | Accuracy (%) | Correct |");
    println!("|---|---:|---|---:|---:|");
    println!("{}", table_row(opts.subset, dims, opts.classifier, &out.report));
    if let Some(p) = &args.model_out {
        let model = out
            .model
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("--model-out is only available for LDA".into()))?;
        model.write_json(fs::File::create(p)?)?;
        m.outputs.push(display(p));
    }
    if let Some(p) = &args.stats_out {
        out.stats.write_csv(&out.column_names, fs::File::create(p)?)?;
        m.outputs.push(display(p));
    }
    if let Some(p) = &args.report_json {
        let rec = EvalRecord {
            descriptor: opts.subset,
            classifier: opts.classifier,
            dims,
            options: opts,
            report: out.report,
        };
        let json = serde_json::to_string_pretty(&rec).map_err(|e| Error::ModelFormat(e.to_string()))?;
        fs::write(p, json)?;
        m.outputs.push(display(p));
    }
    Ok(EXIT_OK)
}

fn cmd_ablate(args: &AblateArgs, m: &mut RunManifest) -> Result<i32> {
    m.inputs.push(display(&args.features));
    let table = m.time("read", || FeatureTable::read_path(&args.features))?;
    let classifiers = if args.classifier.is_empty() {
        vec![m.config.classifier]
    } else {
        args.classifier.clone()
    };
    let opts = m.config.eval_options();
    let n_seeds = m.config.seeds;
    let result = m.time("ablate", || ablate(&table, &classifiers, n_seeds, &opts))?;
    let text = match args.format {
        TableFormat::Markdown => result.to_markdown(),
        TableFormat::Csv => result.to_csv(),
    };
    write_output(args.out.as_ref(), &text)?;
    if let Some(p) = &args.out {
        m.outputs.push(display(p));
    }
    Ok(EXIT_OK)
}

fn cmd_report(args: &ReportArgs, m: &mut RunManifest) -> Result<i32> {
    let mut records = Vec::new();
    for p in &args.inputs {
        m.inputs.push(display(p));
        let text = fs::read_to_string(p)?;
        let rec: EvalRecord =
            serde_json::from_str(&text).map_err(|e| Error::ModelFormat(format!("{}: {e}", p.display())))?;
        records.push(rec);
    }
    write_output(args.out.as_ref(), &report_table(&records, args.format))?;
    if let Some(p) = &args.out {
        m.outputs.push(display(p));
    }
    Ok(EXIT_OK)
}

/// Settings for a parsed command line.
pub fn resolve_settings(cli: &Cli) -> Result<Settings> {
    let common = match &cli.command {
        Command::Extract(a) => &a.common,
        Command::Split(a) => &a.common,
        Command::TrainEval(a) => &a.common,
        Command::Ablate(a) => &a.common,
        Command::Report(a) => &a.common,
    };
    let mut s = Settings::from_config(common.config.as_deref())?;
    match &cli.command {
        Command::Extract(a) => s.apply_extraction(&a.extraction),
        Command::Split(a) => {
            if let Some(r) = a.ratio {
                s.ratio = r;
            }
            if let Some(v) = a.seed {
                s.seed = v;
            }
        }
        Command::TrainEval(a) => {
            s.apply_eval(&a.eval);
            if let Some(c) = a.classifier {
                s.classifier = c;
            }
            if let Some(d) = &a.descriptor_subset {
                s.descriptor_subset = d.parse()?;
            }
        }
        Command::Ablate(a) => {
            s.apply_eval(&a.eval);
            if let Some(n) = a.seeds {
                s.seeds = n;
            }
        }
        Command::Report(_) => {}
    }
    Ok(s)
}

/// Runs a parsed command and returns its exit code. Exactly one manifest
/// line is appended per run, whatever the outcome.
pub fn execute(cli: &Cli) -> i32 {
    let (name, common, anchor) = match &cli.command {
        Command::Extract(a) => ("extract", &a.common, a.out.as_path()),
        Command::Split(a) => ("split", &a.common, a.out.as_path()),
        Command::TrainEval(a) => ("train-eval", &a.common, a.features.as_path()),
        Command::Ablate(a) => ("ablate", &a.common, a.features.as_path()),
        Command::Report(a) => ("report", &a.common, a.inputs[0].as_path()),
    };
    let settings = match resolve_settings(cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_UNUSABLE;
        }
    };
    let mut m = RunManifest::new(name, &settings);
    let started = Instant::now();
    let result = match &cli.command {
        Command::Extract(a) => cmd_extract(a, &mut m),
        Command::Split(a) => cmd_split(a, &mut m),
        Command::TrainEval(a) => cmd_train_eval(a, &mut m),
        Command::Ablate(a) => cmd_ablate(a, &mut m),
        Command::Report(a) => cmd_report(a, &mut m),
    };
    let code = result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        m.errors.push(ImageFailure {
            source_id: String::new(),
            message: e.to_string(),
        });
        EXIT_UNUSABLE
    });
    m.exit_code = code;
    m.timings.insert("total".into(), started.elapsed().as_secs_f64());
    let path = manifest_path(common.manifest.as_ref(), anchor);
    if let Err(e) = m.append_to(&path) {
        eprintln!("warning: could not append manifest to {}: {e}", path.display());
    }
    code
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_UNUSABLE
            } else {
                EXIT_OK
            }
        }
    }
}
