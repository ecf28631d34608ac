//! Shrinkage-regularized linear discriminant analysis, a k-NN baseline and
//! evaluation metrics.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SHRINKAGE: f64 = 0.01;

/// Anything that maps a feature vector to one of its class labels.
pub trait Classifier {
    /// Class labels in index order.
    fn classes(&self) -> &[String];

    fn predict_index(&self, v: &[f64]) -> Result<usize>;

    fn predict(&self, v: &[f64]) -> Result<&str> {
        Ok(&self.classes()[self.predict_index(v)?])
    }

    fn predict_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<String>> {
        rows.iter().map(|r| self.predict(r).map(str::to_string)).collect()
    }
}

struct Grouped {
    classes: Vec<String>,
    members: Vec<Vec<usize>>,
    dims: usize,
}

fn group<S: AsRef<str>>(x: &[Vec<f64>], labels: &[S]) -> Result<Grouped> {
    if x.is_empty() {
        return Err(Error::EmptySet("training vectors"));
    }
    if x.len() != labels.len() {
        return Err(Error::DimensionMismatch(format!("{} vectors, {} labels", x.len(), labels.len())));
    }
    let dims = x[0].len();
    if dims == 0 || x.iter().any(|r| r.len() != dims) {
        return Err(Error::DimensionMismatch("ragged or empty training vectors".into()));
    }
    let classes: Vec<String> = labels
        .iter()
        .map(|l| l.as_ref().to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut members = vec![Vec::new(); classes.len()];
    for (i, l) in labels.iter().enumerate() {
        let c = classes.binary_search_by(|c| c.as_str().cmp(l.as_ref())).expect("label present");
        members[c].push(i);
    }
    Ok(Grouped { classes, members, dims })
}

fn class_means(x: &[Vec<f64>], g: &Grouped) -> Vec<Vec<f64>> {
    g.members
        .iter()
        .map(|idx| {
            let mut m = vec![0.0; g.dims];
            for &i in idx {
                for (acc, v) in m.iter_mut().zip(&x[i]) {
                    *acc += v;
                }
            }
            m.iter_mut().for_each(|v| *v /= idx.len() as f64);
            m
        })
        .collect()
}

/// Pooled within-class covariance blended toward `mean variance * I`:
/// `(1 - shrinkage) * S_pool + shrinkage * (tr(S_pool) / d) * I`.
pub fn shrunk_covariance<S: AsRef<str>>(x: &[Vec<f64>], labels: &[S], shrinkage: f64) -> Result<DMatrix<f64>> {
    let g = group(x, labels)?;
    let means = class_means(x, &g);
    Ok(shrink(pooled_scatter(x, &g, &means), shrinkage))
}

fn pooled_scatter(x: &[Vec<f64>], g: &Grouped, means: &[Vec<f64>]) -> DMatrix<f64> {
    let d = g.dims;
    let mut s = DMatrix::<f64>::zeros(d, d);
    let mut centered = DVector::<f64>::zeros(d);
    for (idx, mu) in g.members.iter().zip(means) {
        for &i in idx {
            for k in 0..d {
                centered[k] = x[i][k] - mu[k];
            }
            s.syger(1.0, &centered, &centered, 1.0);
        }
    }
    // mirror the lower triangle written by syger
    s.fill_upper_triangle_with_lower_triangle();
    let dof = (x.len() - g.classes.len()).max(1) as f64;
    s / dof
}

fn shrink(mut s: DMatrix<f64>, shrinkage: f64) -> DMatrix<f64> {
    let d = s.nrows();
    let mean_var = s.trace() / d as f64;
    s *= 1.0 - shrinkage;
    for k in 0..d {
        s[(k, k)] += shrinkage * mean_var;
    }
    s
}

/// Linear discriminant analysis with a shared, shrinkage-regularized covariance.
///
/// Scores are `x . W_c + b_c` with `W_c = Sigma^-1 mu_c` and
/// `b_c = -mu_c . W_c / 2 + ln(prior_c)`; `Sigma` is kept as its Cholesky factor.
#[derive(Clone, Debug, PartialEq)]
pub struct LdaModel {
    classes: Vec<String>,
    priors: Vec<f64>,
    means: Vec<Vec<f64>>,
    chol_lower: DMatrix<f64>,
    shrinkage: f64,
    weights: Vec<Vec<f64>>,
    intercepts: Vec<f64>,
}

pub fn lda_fit<S: AsRef<str>>(x: &[Vec<f64>], labels: &[S], shrinkage: f64) -> Result<LdaModel> {
    if !(0.0..=1.0).contains(&shrinkage) {
        return Err(Error::InvalidParameter(format!("shrinkage {shrinkage} outside [0, 1]")));
    }
    let g = group(x, labels)?;
    if g.classes.len() < 2 {
        return Err(Error::DegenerateClass("at least two classes are required".into()));
    }
    if let Some((c, idx)) = g.classes.iter().zip(&g.members).find(|(_, m)| m.len() < 2) {
        return Err(Error::DegenerateClass(format!("class {c:?} has {} sample(s)", idx.len())));
    }
    let means = class_means(x, &g);
    let sigma = shrink(pooled_scatter(x, &g, &means), shrinkage);
    let chol = sigma.cholesky().ok_or(Error::SingularCovariance)?;
    let n = x.len() as f64;
    let priors = g.members.iter().map(|m| m.len() as f64 / n).collect();
    LdaModel::from_parts(g.classes, priors, means, chol.l(), shrinkage)
}

impl LdaModel {
    fn from_parts(
        classes: Vec<String>,
        priors: Vec<f64>,
        means: Vec<Vec<f64>>,
        chol_lower: DMatrix<f64>,
        shrinkage: f64,
    ) -> Result<Self> {
        let d = chol_lower.nrows();
        if chol_lower.ncols() != d || means.iter().any(|m| m.len() != d) || priors.len() != classes.len() || means.len() != classes.len() {
            return Err(Error::ModelFormat("inconsistent model dimensions".into()));
        }
        if (0..d).any(|k| !(chol_lower[(k, k)] > 0.0)) {
            return Err(Error::SingularCovariance);
        }
        let mut weights = Vec::with_capacity(classes.len());
        let mut intercepts = Vec::with_capacity(classes.len());
        for (mu, &prior) in means.iter().zip(&priors) {
            let mu_v = DVector::from_column_slice(mu);
            let y = chol_lower.solve_lower_triangular(&mu_v).ok_or(Error::SingularCovariance)?;
            let w = chol_lower.tr_solve_lower_triangular(&y).ok_or(Error::SingularCovariance)?;
            intercepts.push(-0.5 * mu_v.dot(&w) + prior.ln());
            weights.push(w.as_slice().to_vec());
        }
        Ok(Self {
            classes,
            priors,
            means,
            chol_lower,
            shrinkage,
            weights,
            intercepts,
        })
    }

    pub fn dims(&self) -> usize {
        self.chol_lower.nrows()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn class_means(&self) -> &[Vec<f64>] {
        &self.means
    }

    pub fn shrinkage(&self) -> f64 {
        self.shrinkage
    }

    /// The regularized covariance, rebuilt from its factor.
    pub fn covariance(&self) -> DMatrix<f64> {
        &self.chol_lower * self.chol_lower.transpose()
    }

    pub fn coefficients(&self) -> (&[Vec<f64>], &[f64]) {
        (&self.weights, &self.intercepts)
    }

    /// Discriminant score per class.
    pub fn scores(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dims() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", v.len(), self.dims())));
        }
        Ok(self
            .weights
            .iter()
            .zip(&self.intercepts)
            .map(|(w, b)| w.iter().zip(v).map(|(a, x)| a * x).sum::<f64>() + b)
            .collect())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        let d = self.dims();
        let stored = StoredLda {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            classes: self.classes.clone(),
            priors: self.priors.clone(),
            means: self.means.clone(),
            cholesky_lower: (0..d).map(|i| (0..=i).map(|j| self.chol_lower[(i, j)]).collect()).collect(),
            shrinkage: self.shrinkage,
        };
        serde_json::to_writer(out, &stored).map_err(|e| Error::ModelFormat(e.to_string()))
    }

    pub fn read_json<R: Read>(input: R) -> Result<Self> {
        let s: StoredLda = serde_json::from_reader(input).map_err(|e| Error::ModelFormat(e.to_string()))?;
        if s.format != MODEL_FORMAT || s.version != MODEL_VERSION {
            return Err(Error::ModelFormat(format!("unsupported model {} v{}", s.format, s.version)));
        }
        let d = s.cholesky_lower.len();
        let mut l = DMatrix::zeros(d, d);
        for (i, row) in s.cholesky_lower.iter().enumerate() {
            if row.len() != i + 1 {
                return Err(Error::ModelFormat(format!("factor row {i} has {} entries", row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                l[(i, j)] = v;
            }
        }
        Self::from_parts(s.classes, s.priors, s.means, l, s.shrinkage)
    }
}

const MODEL_FORMAT: &str = "texpyr-lda";
const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct StoredLda {
    format: String,
    version: u32,
    classes: Vec<String>,
    priors: Vec<f64>,
    means: Vec<Vec<f64>>,
    cholesky_lower: Vec<Vec<f64>>,
    shrinkage: f64,
}

impl Classifier for LdaModel {
    fn classes(&self) -> &[String] {
        &self.classes
    }

    /// Highest score wins; ties go to the lowest class index.
    fn predict_index(&self, v: &[f64]) -> Result<usize> {
        let scores = self.scores(v)?;
        let mut best = 0;
        for (c, &s) in scores.iter().enumerate().skip(1) {
            if s > scores[best] {
                best = c;
            }
        }
        Ok(best)
    }
}

pub fn lda_predict<'m>(model: &'m LdaModel, v: &[f64]) -> Result<&'m str> {
    model.predict(v)
}

/// Stores the training set; prediction is a Euclidean k-nearest-neighbour vote.
#[derive(Clone, Debug, PartialEq)]
pub struct KnnModel {
    classes: Vec<String>,
    rows: Vec<Vec<f64>>,
    class_of: Vec<usize>,
    k: usize,
}

impl KnnModel {
    pub fn fit<S: AsRef<str>>(x: &[Vec<f64>], labels: &[S], k: usize) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::EmptySet("k-NN training set"));
        }
        let g = group(x, labels)?;
        if k == 0 || k > x.len() {
            return Err(Error::InvalidParameter(format!("k = {k} with {} training rows", x.len())));
        }
        let mut class_of = vec![0; x.len()];
        for (c, idx) in g.members.iter().enumerate() {
            for &i in idx {
                class_of[i] = c;
            }
        }
        Ok(Self {
            classes: g.classes,
            rows: x.to_vec(),
            class_of,
            k,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl Classifier for KnnModel {
    fn classes(&self) -> &[String] {
        &self.classes
    }

    /// Majority of the `k` nearest rows (distance ties broken by row order);
    /// vote ties go to the smaller mean distance, then the lower class index.
    fn predict_index(&self, v: &[f64]) -> Result<usize> {
        let d = self.rows[0].len();
        if v.len() != d {
            return Err(Error::DimensionMismatch(format!("{} vs {d}", v.len())));
        }
        let mut dist: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(), i))
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes = vec![0usize; self.classes.len()];
        let mut dsum = vec![0.0; self.classes.len()];
        for &(dv, i) in &dist[..self.k] {
            votes[self.class_of[i]] += 1;
            dsum[self.class_of[i]] += dv;
        }
        let mut best = 0;
        for c in 1..votes.len() {
            let better = votes[c] > votes[best]
                || (votes[c] == votes[best] && votes[c] > 0 && dsum[c] / (votes[c] as f64) < dsum[best] / (votes[best] as f64));
            if better {
                best = c;
            }
        }
        Ok(best)
    }
}

pub fn knn_predict<S: AsRef<str>>(train: &[Vec<f64>], labels: &[S], v: &[f64], k: usize) -> Result<String> {
    let m = KnnModel::fit(train, labels, k)?;
    m.predict(v).map(str::to_string)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitDescriptor {
    pub seed: u64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub labels: Vec<String>,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<u64>>,
    pub accuracy: f64,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub split: Option<SplitDescriptor>,
}

impl EvalReport {
    pub fn total(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.confusion[i][i]).sum()
    }
}

/// Tallies predictions against ground truth.
pub fn evaluate_predictions<S: AsRef<str>, T: AsRef<str>>(truth: &[S], predicted: &[T], split: Option<SplitDescriptor>) -> Result<EvalReport> {
    if truth.is_empty() {
        return Err(Error::EmptySet("test set"));
    }
    if truth.len() != predicted.len() {
        return Err(Error::DimensionMismatch(format!("{} truths, {} predictions", truth.len(), predicted.len())));
    }
    let labels: Vec<String> = truth
        .iter()
        .map(|s| s.as_ref())
        .chain(predicted.iter().map(|s| s.as_ref()))
        .map(str::to_string)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index = |s: &str| labels.binary_search_by(|l| l.as_str().cmp(s)).expect("label present");
    let c = labels.len();
    let mut confusion = vec![vec![0u64; c]; c];
    for (t, p) in truth.iter().zip(predicted) {
        confusion[index(t.as_ref())][index(p.as_ref())] += 1;
    }
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = (0..c)
        .map(|j| ratio(confusion[j][j], (0..c).map(|i| confusion[i][j]).sum()))
        .collect();
    let recall = (0..c).map(|i| ratio(confusion[i][i], confusion[i].iter().sum())).collect();
    let correct: u64 = (0..c).map(|i| confusion[i][i]).sum();
    Ok(EvalReport {
        labels,
        confusion,
        accuracy: correct as f64 / truth.len() as f64,
        precision,
        recall,
        split,
    })
}

pub fn evaluate<M: Classifier + ?Sized, S: AsRef<str>>(
    model: &M,
    test_x: &[Vec<f64>],
    test_labels: &[S],
    split: Option<SplitDescriptor>,
) -> Result<EvalReport> {
    if test_x.is_empty() {
        return Err(Error::EmptySet("test set"));
    }
    let predicted = model.predict_batch(test_x)?;
    evaluate_predictions(test_labels, &predicted, split)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}
