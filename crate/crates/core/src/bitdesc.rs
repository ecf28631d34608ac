//! Bio-inspired texture (BiT) descriptor.
//!
//! A channel is read as an ecosystem: every occupied gray level is a species
//! and its pixel count the abundance. Seven biodiversity indices summarize
//! richness and evenness; seven taxonomic indices use the absolute gray-level
//! difference as the distance between two species.

use crate::error::{Error, Result};
use crate::imagecore::GrayImage;
use crate::infotheory::Histogram256;

/// Bracket used when Newton's method for Fisher's alpha has to fall back to bisection.
pub const FISHER_ALPHA_BRACKET: (f64, f64) = (1e-8, 1e8);
const FISHER_MAX_NEWTON: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbundanceVector {
    species: Vec<u8>,
    counts: Vec<u64>,
    total: u64,
}

impl AbundanceVector {
    /// Builds an abundance vector from `(gray level, count)` pairs.
    ///
    /// Zero counts are dropped; levels must be distinct.
    pub fn new(pairs: impl IntoIterator<Item = (u8, u64)>) -> Result<Self> {
        let mut pairs: Vec<_> = pairs.into_iter().filter(|&(_, c)| c > 0).collect();
        pairs.sort_unstable_by_key(|&(s, _)| s);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter("duplicate species level".into()));
        }
        if pairs.is_empty() {
            return Err(Error::EmptyImage);
        }
        let total = pairs.iter().map(|&(_, c)| c).sum();
        let (species, counts) = pairs.into_iter().unzip();
        Ok(Self { species, counts, total })
    }

    pub fn species(&self) -> &[u8] {
        &self.species
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of individuals, N.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of species, S.
    pub fn richness(&self) -> usize {
        self.species.len()
    }
}

pub fn abundance(img: &GrayImage) -> Result<AbundanceVector> {
    if img.is_empty() {
        return Err(Error::EmptyImage);
    }
    let hist = Histogram256::of(img);
    AbundanceVector::new(hist.bins().iter().enumerate().map(|(v, &c)| (v as u8, c)))
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BiodiversityIndices {
    pub margalef: f64,
    pub menhinick: f64,
    pub berger_parker: f64,
    pub fisher_alpha: f64,
    pub kempton_taylor_q: f64,
    pub mcintosh: f64,
    pub shannon_wiener: f64,
}

impl BiodiversityIndices {
    pub fn to_array(&self) -> [f64; 7] {
        [
            self.margalef,
            self.menhinick,
            self.berger_parker,
            self.fisher_alpha,
            self.kempton_taylor_q,
            self.mcintosh,
            self.shannon_wiener,
        ]
    }
}

pub fn biodiversity_indices(a: &AbundanceVector) -> Result<BiodiversityIndices> {
    if a.total < 2 {
        return Err(Error::DegenerateAbundance(a.total));
    }
    let n = a.total as f64;
    let s = a.richness() as f64;
    let max = *a.counts.iter().max().expect("non-empty") as f64;
    let u = a.counts.iter().map(|&c| (c as f64).powi(2)).sum::<f64>().sqrt();
    let shannon_wiener = -a
        .counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>();
    Ok(BiodiversityIndices {
        margalef: (s - 1.0) / n.ln(),
        menhinick: s / n.sqrt(),
        berger_parker: max / n,
        fisher_alpha: fisher_alpha(a.richness(), a.total),
        kempton_taylor_q: kempton_taylor_q(&a.counts),
        mcintosh: ((n - u) / (n - n.sqrt())).max(0.0),
        shannon_wiener: shannon_wiener.max(0.0),
    })
}

/// Solves `S = alpha * ln(1 + N / alpha)` for alpha.
///
/// Returns 0 for a single species. When every individual is its own species
/// (`S >= N`) there is no finite root and the upper end of
/// [`FISHER_ALPHA_BRACKET`] is returned.
pub fn fisher_alpha(species: usize, individuals: u64) -> f64 {
    if species <= 1 {
        return 0.0;
    }
    let (s, n) = (species as f64, individuals as f64);
    let (lo_bound, hi_bound) = FISHER_ALPHA_BRACKET;
    if species as u64 >= individuals {
        return hi_bound;
    }
    let f = |alpha: f64| alpha * (n / alpha).ln_1p() - s;
    let df = |alpha: f64| (n / alpha).ln_1p() - n / (alpha + n);

    // f is increasing in alpha, so any iterate tightens the bracket
    let (mut lo, mut hi) = (lo_bound, hi_bound);
    if f(hi) < 0.0 {
        return hi_bound;
    }
    let mut alpha = s;
    for _ in 0..FISHER_MAX_NEWTON {
        let r = f(alpha);
        if r.abs() < 1e-12 * s.max(1.0) {
            return alpha;
        }
        if r < 0.0 {
            lo = alpha;
        } else {
            hi = alpha;
        }
        let d = df(alpha);
        let step = alpha - r / d;
        alpha = if d > 0.0 && step.is_finite() && step > lo && step < hi {
            step
        } else {
            // geometric midpoint, the bracket spans many decades
            (lo * hi).sqrt()
        };
    }
    // Newton stalled: finish by plain bisection on the current bracket
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `(S/2) / ln(R_upper / R_lower)` on ascending abundances, quartile ranks
/// `ceil(S/4)` and `floor(3S/4)`; 0 when `S < 4` or the quartiles are equal.
fn kempton_taylor_q(counts: &[u64]) -> f64 {
    let s = counts.len();
    if s < 4 {
        return 0.0;
    }
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let lower = sorted[s.div_ceil(4)] as f64;
    let upper = sorted[((3 * s) / 4).min(s - 1)] as f64;
    let ratio = (upper / lower).ln();
    if ratio <= 0.0 {
        return 0.0;
    }
    (s as f64 / 2.0) / ratio
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TaxonomicIndices {
    pub taxo_diversity: f64,
    pub taxo_distinctness: f64,
    pub sum_phylo_dist: f64,
    pub avg_nn_dist: f64,
    pub intensive_quad_entropy: f64,
    pub extensive_quad_entropy: f64,
    pub total_taxo_distinctness: f64,
}

impl TaxonomicIndices {
    pub fn to_array(&self) -> [f64; 7] {
        [
            self.taxo_diversity,
            self.taxo_distinctness,
            self.sum_phylo_dist,
            self.avg_nn_dist,
            self.intensive_quad_entropy,
            self.extensive_quad_entropy,
            self.total_taxo_distinctness,
        ]
    }
}

/// Distance-based indices with `d(i, j) = |level_i - level_j|`. A single species yields zeros.
pub fn taxonomic_indices(a: &AbundanceVector) -> TaxonomicIndices {
    let s = a.richness();
    if s < 2 {
        return TaxonomicIndices::default();
    }
    let levels: Vec<f64> = a.species.iter().map(|&v| f64::from(v)).collect();
    let counts: Vec<f64> = a.counts.iter().map(|&c| c as f64).collect();
    let n = a.total as f64;

    let mut weighted = 0.0;
    let mut pair_weight = 0.0;
    let mut pair_dist = 0.0;
    let mut row_sums = vec![0.0; s];
    for i in 0..s {
        for j in i + 1..s {
            let d = (levels[i] - levels[j]).abs();
            let xx = counts[i] * counts[j];
            weighted += d * xx;
            pair_weight += xx;
            pair_dist += d;
            row_sums[i] += d;
            row_sums[j] += d;
        }
    }
    // species are sorted, so the nearest neighbour is adjacent
    let nn_sum: f64 = (0..s)
        .map(|i| {
            let left = (i > 0).then(|| levels[i] - levels[i - 1]);
            let right = (i + 1 < s).then(|| levels[i + 1] - levels[i]);
            match (left, right) {
                (Some(l), Some(r)) => l.min(r),
                (Some(d), None) | (None, Some(d)) => d,
                (None, None) => 0.0,
            }
        })
        .sum();
    let sf = s as f64;
    let all_ordered = 2.0 * pair_dist;
    TaxonomicIndices {
        taxo_diversity: weighted / (n * (n - 1.0) / 2.0),
        taxo_distinctness: if pair_weight > 0.0 { weighted / pair_weight } else { 0.0 },
        sum_phylo_dist: pair_dist,
        avg_nn_dist: nn_sum / sf,
        intensive_quad_entropy: all_ordered / (sf * sf),
        extensive_quad_entropy: all_ordered / sf,
        total_taxo_distinctness: row_sums.iter().sum::<f64>() / (sf - 1.0),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BitFeatures {
    pub biodiversity: BiodiversityIndices,
    pub taxonomic: TaxonomicIndices,
}

impl BitFeatures {
    pub const NAMES: [&'static str; 14] = [
        "margalef",
        "menhinick",
        "berger_parker",
        "fisher_alpha",
        "kempton_taylor_q",
        "mcintosh",
        "shannon_wiener",
        "taxo_diversity",
        "taxo_distinctness",
        "sum_phylo_dist",
        "avg_nn_dist",
        "intensive_quad_entropy",
        "extensive_quad_entropy",
        "total_taxo_distinctness",
    ];

    pub fn to_array(&self) -> [f64; 14] {
        let mut out = [0.0; 14];
        out[..7].copy_from_slice(&self.biodiversity.to_array());
        out[7..].copy_from_slice(&self.taxonomic.to_array());
        out
    }
}

pub fn bit_block(img: &GrayImage) -> Result<BitFeatures> {
    let a = abundance(img)?;
    Ok(BitFeatures {
        biodiversity: biodiversity_indices(&a)?,
        taxonomic: taxonomic_indices(&a),
    })
}
