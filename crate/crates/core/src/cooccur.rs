//! Gray-level co-occurrence matrices with the six GLCM properties and the
//! thirteen Haralick statistics.
//!
//! Gray levels are indexed from 0. Entropies are in bits, skipping zero
//! cells and flooring logarithm arguments at [`LOG_FLOOR`]. When a marginal
//! has zero variance, correlations are defined as 1.

use crate::error::{Error, Result};
use crate::imagecore::{quantize, GrayImage};

/// Lower bound applied to every logarithm argument.
pub const LOG_FLOOR: f64 = 1e-12;

/// Unit offsets for 0, 45, 90 and 135 degrees (dx along columns, dy along rows).
pub const DIRECTIONS: [(i32, i32); 4] = [(1, 0), (1, 1), (0, 1), (-1, 1)];

const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct CooccurrenceMatrix {
    levels: usize,
    counts: Vec<f64>,
    offsets: Vec<(i32, i32)>,
    symmetric: bool,
    normalized: bool,
}

impl CooccurrenceMatrix {
    /// Wraps an explicit `levels x levels` table, row-major.
    pub fn from_table(levels: usize, counts: Vec<f64>, normalized: bool) -> Result<Self> {
        if levels == 0 || counts.len() != levels * levels {
            return Err(Error::DimensionMismatch(format!(
                "{} cells for {levels} gray levels",
                counts.len()
            )));
        }
        if counts.iter().any(|&c| !(c >= 0.0)) {
            return Err(Error::InvalidParameter("co-occurrence counts must be non-negative".into()));
        }
        let symmetric = (0..levels).all(|i| (0..levels).all(|j| counts[i * levels + j] == counts[j * levels + i]));
        Ok(Self {
            levels,
            counts,
            offsets: Vec::new(),
            symmetric,
            normalized,
        })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn offsets(&self) -> &[(i32, i32)] {
        &self.offsets
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.counts[i * self.levels + j]
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    pub fn transpose(&self) -> Self {
        let g = self.levels;
        let counts = (0..g * g).map(|k| self.counts[(k % g) * g + k / g]).collect();
        Self { counts, ..self.clone() }
    }

    pub fn normalize(mut self) -> Self {
        let total = self.total();
        if total > 0.0 {
            self.counts.iter_mut().for_each(|c| *c /= total);
        }
        self.normalized = true;
        self
    }

    fn probabilities(&self) -> Result<&[f64]> {
        if !self.normalized || (self.total() - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized);
        }
        Ok(&self.counts)
    }
}

/// Counts `(img[p], img[p + offset])` pairs over every listed offset.
///
/// `symmetric` adds the transpose; `normalize` divides by the total.
pub fn compute_glcm(
    img: &GrayImage,
    levels: usize,
    offsets: &[(i32, i32)],
    symmetric: bool,
    normalize: bool,
) -> Result<CooccurrenceMatrix> {
    if !(1..=256).contains(&levels) {
        return Err(Error::InvalidLevelCount(levels));
    }
    if let Some(&value) = img.data().iter().find(|&&v| usize::from(v) >= levels) {
        return Err(Error::GrayValueOutOfRange { value, levels });
    }
    if offsets.is_empty() {
        return Err(Error::InvalidParameter("at least one offset is required".into()));
    }
    let (w, h) = (img.width() as i64, img.height() as i64);
    let data = img.data();
    let mut counts = vec![0u64; levels * levels];
    for &(dx, dy) in offsets {
        if dx == 0 && dy == 0 {
            return Err(Error::OffsetOutOfRange { dx, dy });
        }
        let (dx64, dy64) = (i64::from(dx), i64::from(dy));
        if dx64.abs() >= w || dy64.abs() >= h {
            return Err(Error::EmptyPairSet {
                dx,
                dy,
                width: w as usize,
                height: h as usize,
            });
        }
        let (x0, x1) = ((-dx64).max(0), w - dx64.max(0));
        let (y0, y1) = ((-dy64).max(0), h - dy64.max(0));
        for y in y0..y1 {
            let row = (y * w) as usize;
            let nrow = ((y + dy64) * w) as usize;
            for x in x0..x1 {
                let a = usize::from(data[row + x as usize]);
                let b = usize::from(data[nrow + (x + dx64) as usize]);
                counts[a * levels + b] += 1;
            }
        }
    }
    if symmetric {
        for i in 0..levels {
            for j in i..levels {
                let s = counts[i * levels + j] + counts[j * levels + i];
                counts[i * levels + j] = s;
                counts[j * levels + i] = s;
            }
        }
    }
    let m = CooccurrenceMatrix {
        levels,
        counts: counts.into_iter().map(|c| c as f64).collect(),
        offsets: offsets.to_vec(),
        symmetric,
        normalized: false,
    };
    Ok(if normalize { m.normalize() } else { m })
}

/// The six classic GLCM properties.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GlcmFeatures {
    pub contrast: f64,
    pub dissimilarity: f64,
    pub homogeneity: f64,
    pub energy: f64,
    pub correlation: f64,
    pub asm: f64,
}

impl GlcmFeatures {
    pub const NAMES: [&'static str; 6] = ["contrast", "dissimilarity", "homogeneity", "energy", "correlation", "asm"];

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.contrast,
            self.dissimilarity,
            self.homogeneity,
            self.energy,
            self.correlation,
            self.asm,
        ]
    }

    fn from_array(a: [f64; 6]) -> Self {
        Self {
            contrast: a[0],
            dissimilarity: a[1],
            homogeneity: a[2],
            energy: a[3],
            correlation: a[4],
            asm: a[5],
        }
    }
}

struct Marginals {
    px: Vec<f64>,
    py: Vec<f64>,
    mean_x: f64,
    mean_y: f64,
    std_x: f64,
    std_y: f64,
}

fn marginals(p: &[f64], g: usize) -> Marginals {
    let mut px = vec![0.0; g];
    let mut py = vec![0.0; g];
    for i in 0..g {
        for j in 0..g {
            let v = p[i * g + j];
            px[i] += v;
            py[j] += v;
        }
    }
    let mean = |m: &[f64]| m.iter().enumerate().map(|(k, &v)| k as f64 * v).sum::<f64>();
    let (mean_x, mean_y) = (mean(&px), mean(&py));
    let var = |m: &[f64], mu: f64| m.iter().enumerate().map(|(k, &v)| (k as f64 - mu).powi(2) * v).sum::<f64>();
    let (std_x, std_y) = (var(&px, mean_x).sqrt(), var(&py, mean_y).sqrt());
    Marginals {
        px,
        py,
        mean_x,
        mean_y,
        std_x,
        std_y,
    }
}

fn correlation(p: &[f64], g: usize, m: &Marginals) -> f64 {
    let denom = m.std_x * m.std_y;
    if denom <= 0.0 {
        return 1.0;
    }
    let mut acc = 0.0;
    for i in 0..g {
        for j in 0..g {
            acc += p[i * g + j] * (i as f64 - m.mean_x) * (j as f64 - m.mean_y);
        }
    }
    (acc / denom).clamp(-1.0, 1.0)
}

pub fn glcm_features(m: &CooccurrenceMatrix) -> Result<GlcmFeatures> {
    let p = m.probabilities()?;
    let g = m.levels;
    let mut f = GlcmFeatures::default();
    for i in 0..g {
        for j in 0..g {
            let v = p[i * g + j];
            if v == 0.0 {
                continue;
            }
            let d = i as f64 - j as f64;
            f.contrast += v * d * d;
            f.dissimilarity += v * d.abs();
            f.homogeneity += v / (1.0 + d * d);
            f.asm += v * v;
        }
    }
    f.energy = f.asm.sqrt();
    f.correlation = correlation(p, g, &marginals(p, g));
    Ok(f)
}

/// Haralick's statistics f1..f13.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HaralickFeatures {
    pub asm: f64,
    pub contrast: f64,
    pub correlation: f64,
    pub sum_of_squares_variance: f64,
    pub inverse_difference_moment: f64,
    pub sum_average: f64,
    pub sum_variance: f64,
    pub sum_entropy: f64,
    pub entropy: f64,
    pub difference_variance: f64,
    pub difference_entropy: f64,
    pub info_correlation_1: f64,
    pub info_correlation_2: f64,
}

impl HaralickFeatures {
    pub const NAMES: [&'static str; 13] = [
        "f01_asm",
        "f02_contrast",
        "f03_correlation",
        "f04_sum_sq_variance",
        "f05_idm",
        "f06_sum_average",
        "f07_sum_variance",
        "f08_sum_entropy",
        "f09_entropy",
        "f10_diff_variance",
        "f11_diff_entropy",
        "f12_info_corr_1",
        "f13_info_corr_2",
    ];

    pub fn to_array(&self) -> [f64; 13] {
        [
            self.asm,
            self.contrast,
            self.correlation,
            self.sum_of_squares_variance,
            self.inverse_difference_moment,
            self.sum_average,
            self.sum_variance,
            self.sum_entropy,
            self.entropy,
            self.difference_variance,
            self.difference_entropy,
            self.info_correlation_1,
            self.info_correlation_2,
        ]
    }

    fn from_array(a: [f64; 13]) -> Self {
        Self {
            asm: a[0],
            contrast: a[1],
            correlation: a[2],
            sum_of_squares_variance: a[3],
            inverse_difference_moment: a[4],
            sum_average: a[5],
            sum_variance: a[6],
            sum_entropy: a[7],
            entropy: a[8],
            difference_variance: a[9],
            difference_entropy: a[10],
            info_correlation_1: a[11],
            info_correlation_2: a[12],
        }
    }
}

#[inline]
fn log2_floored(v: f64) -> f64 {
    v.max(LOG_FLOOR).log2()
}

fn entropy_bits<'a>(probs: impl IntoIterator<Item = &'a f64>) -> f64 {
    -probs
        .into_iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * log2_floored(v))
        .sum::<f64>()
}

pub fn haralick_features(m: &CooccurrenceMatrix) -> Result<HaralickFeatures> {
    let p = m.probabilities()?;
    let g = m.levels;
    let marg = marginals(p, g);

    let mut p_sum = vec![0.0; 2 * g - 1];
    let mut p_diff = vec![0.0; g];
    let mut asm = 0.0;
    let mut idm = 0.0;
    let mut sum_sq = 0.0;
    for i in 0..g {
        for j in 0..g {
            let v = p[i * g + j];
            if v == 0.0 {
                continue;
            }
            p_sum[i + j] += v;
            p_diff[i.abs_diff(j)] += v;
            asm += v * v;
            let d = i as f64 - j as f64;
            idm += v / (1.0 + d * d);
            sum_sq += v * (i as f64 - marg.mean_x).powi(2);
        }
    }

    let contrast: f64 = p_diff.iter().enumerate().map(|(k, &v)| (k * k) as f64 * v).sum();
    let sum_average: f64 = p_sum.iter().enumerate().map(|(k, &v)| k as f64 * v).sum();
    let sum_variance: f64 = p_sum.iter().enumerate().map(|(k, &v)| (k as f64 - sum_average).powi(2) * v).sum();
    let sum_entropy = entropy_bits(&p_sum);
    let entropy = entropy_bits(p);
    let diff_mean: f64 = p_diff.iter().enumerate().map(|(k, &v)| k as f64 * v).sum();
    let difference_variance: f64 = p_diff.iter().enumerate().map(|(k, &v)| (k as f64 - diff_mean).powi(2) * v).sum();
    let difference_entropy = entropy_bits(&p_diff);

    let hx = entropy_bits(&marg.px);
    let hy = entropy_bits(&marg.py);
    let mut hxy1 = 0.0;
    let mut hxy2 = 0.0;
    for i in 0..g {
        for j in 0..g {
            let q = marg.px[i] * marg.py[j];
            if q == 0.0 {
                continue;
            }
            let lq = log2_floored(q);
            hxy1 -= p[i * g + j] * lq;
            hxy2 -= q * lq;
        }
    }
    let hmax = hx.max(hy);
    let info_correlation_1 = if hmax > 0.0 { (entropy - hxy1) / hmax } else { 0.0 };
    // 1 - exp(-2 (HXY2 - HXY)) with entropies in bits
    let gap = (hxy2 - entropy).max(0.0);
    let info_correlation_2 = (1.0 - (-2.0 * gap).exp2()).max(0.0).sqrt().min(1.0);

    Ok(HaralickFeatures {
        asm,
        contrast,
        correlation: correlation(p, g, &marg),
        sum_of_squares_variance: sum_sq,
        inverse_difference_moment: idm,
        sum_average,
        sum_variance,
        sum_entropy,
        entropy,
        difference_variance,
        difference_entropy,
        info_correlation_1,
        info_correlation_2,
    })
}

/// Quantizes to `levels`, then averages GLCM and Haralick features over the
/// four [`DIRECTIONS`] scaled by `distance`, one symmetric normalized matrix each.
pub fn texture_features_gray(img: &GrayImage, levels: usize, distance: u32) -> Result<(GlcmFeatures, HaralickFeatures)> {
    if distance == 0 || distance > i32::MAX as u32 {
        return Err(Error::InvalidParameter(format!("GLCM distance {distance}")));
    }
    let q = quantize(img, levels)?;
    let d = distance as i32;
    let mut glcm_acc = [0.0; 6];
    let mut har_acc = [0.0; 13];
    for (dx, dy) in DIRECTIONS {
        let m = compute_glcm(&q, levels, &[(dx * d, dy * d)], true, true)?;
        for (acc, v) in glcm_acc.iter_mut().zip(glcm_features(&m)?.to_array()) {
            *acc += v;
        }
        for (acc, v) in har_acc.iter_mut().zip(haralick_features(&m)?.to_array()) {
            *acc += v;
        }
    }
    let n = DIRECTIONS.len() as f64;
    glcm_acc.iter_mut().for_each(|v| *v /= n);
    har_acc.iter_mut().for_each(|v| *v /= n);
    Ok((GlcmFeatures::from_array(glcm_acc), HaralickFeatures::from_array(har_acc)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn img(rows: &[&[u8]]) -> GrayImage {
        let w = rows[0].len();
        GrayImage::new(w, rows.len(), rows.concat()).unwrap()
    }

    fn table(levels: usize, cells: &[f64]) -> CooccurrenceMatrix {
        CooccurrenceMatrix::from_table(levels, cells.to_vec(), true).unwrap()
    }

    /// Enumerates every (p, p + offset) pair without any index shortcuts.
    fn brute_glcm(img: &GrayImage, levels: usize, offsets: &[(i32, i32)], symmetric: bool) -> Vec<u64> {
        let mut c = vec![0u64; levels * levels];
        for &(dx, dy) in offsets {
            for y in 0..img.height() as i32 {
                for x in 0..img.width() as i32 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= img.width() as i32 || ny >= img.height() as i32 {
                        continue;
                    }
                    let a = img.get(x as usize, y as usize) as usize;
                    let b = img.get(nx as usize, ny as usize) as usize;
                    c[a * levels + b] += 1;
                    if symmetric {
                        c[b * levels + a] += 1;
                    }
                }
            }
        }
        c
    }

    #[test]
    fn glcm_examples() {
        let m = compute_glcm(&img(&[&[0, 0], &[0, 0]]), 2, &[(1, 0)], false, false).unwrap();
        assert_eq!(m.counts(), &[2.0, 0.0, 0.0, 0.0]);

        let m = compute_glcm(&GrayImage::filled(5, 4, 3).unwrap(), 4, &[(1, 0), (0, 1)], true, true).unwrap();
        assert_eq!(m.get(3, 3), 1.0);
        assert_eq!(m.total(), 1.0);

        let m = compute_glcm(&img(&[&[0, 1], &[0, 1]]), 2, &[(1, 0)], true, true).unwrap();
        assert_eq!(m.counts(), &[0.0, 0.5, 0.5, 0.0]);
        assert!(m.is_symmetric() && m.is_normalized());
    }

    #[test]
    fn glcm_errors() {
        let im = img(&[&[0, 1], &[0, 1]]);
        assert!(matches!(compute_glcm(&im, 2, &[(0, 0)], true, true), Err(Error::OffsetOutOfRange { .. })));
        assert!(matches!(compute_glcm(&im, 2, &[(2, 0)], true, true), Err(Error::EmptyPairSet { .. })));
        assert!(matches!(compute_glcm(&im, 2, &[(0, -2)], true, true), Err(Error::EmptyPairSet { .. })));
        assert!(matches!(compute_glcm(&im, 1, &[(1, 0)], true, true), Err(Error::GrayValueOutOfRange { value: 1, .. })));
    }

    #[test]
    fn glcm_feature_examples() {
        let point = table(3, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let f = glcm_features(&point).unwrap();
        assert_eq!(f.to_array(), [0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);

        let anti = table(2, &[0.0, 0.5, 0.5, 0.0]);
        let f = glcm_features(&anti).unwrap();
        assert!((f.contrast - 1.0).abs() < 1e-12);
        assert!((f.dissimilarity - 1.0).abs() < 1e-12);
        assert!((f.homogeneity - 0.5).abs() < 1e-12);
        assert!((f.asm - 0.5).abs() < 1e-12);
        assert!((f.energy - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((f.correlation + 1.0).abs() < 1e-12);

        let uniform = table(2, &[0.25; 4]);
        let f = glcm_features(&uniform).unwrap();
        assert!((f.contrast - 0.5).abs() < 1e-12);
        assert!(f.correlation.abs() < 1e-12);
    }

    #[test]
    fn not_normalized_is_rejected() {
        let m = CooccurrenceMatrix::from_table(2, vec![1.0, 1.0, 1.0, 1.0], false).unwrap();
        assert!(matches!(glcm_features(&m), Err(Error::NotNormalized)));
        assert!(matches!(haralick_features(&m), Err(Error::NotNormalized)));
        let lying = CooccurrenceMatrix::from_table(2, vec![1.0, 1.0, 1.0, 1.0], true).unwrap();
        assert!(matches!(glcm_features(&lying), Err(Error::NotNormalized)));
    }

    #[test]
    fn haralick_examples() {
        let point = table(2, &[0.0, 0.0, 0.0, 1.0]);
        let h = haralick_features(&point).unwrap();
        assert_eq!(h.asm, 1.0);
        assert_eq!(h.contrast, 0.0);
        assert_eq!(h.entropy, 0.0);

        let anti = table(2, &[0.0, 0.5, 0.5, 0.0]);
        let h = haralick_features(&anti).unwrap();
        assert!((h.entropy - 1.0).abs() < 1e-12);
        assert!((h.asm - 0.5).abs() < 1e-12);
        // p_sum concentrated at k=1, p_diff at 1
        assert!((h.sum_average - 1.0).abs() < 1e-12);
        assert!(h.sum_entropy.abs() < 1e-12 && h.difference_entropy.abs() < 1e-12);
        // HX = HY = 1, HXY1 = HXY2 = 2, HXY = 1
        assert!((h.info_correlation_1 + 1.0).abs() < 1e-12);
        assert!((h.info_correlation_2 - (1.0 - 0.25f64).sqrt()).abs() < 1e-12);

        let uniform = table(2, &[0.25; 4]);
        let h = haralick_features(&uniform).unwrap();
        assert!((h.entropy - 2.0).abs() < 1e-12);
        assert!(h.info_correlation_2.abs() < 1e-12);
        assert!(h.info_correlation_1.abs() < 1e-12);
    }

    #[test]
    fn texture_features_constant_and_stripes() {
        let (g, h) = texture_features_gray(&GrayImage::filled(9, 7, 200).unwrap(), 8, 1).unwrap();
        assert_eq!(g.to_array(), [0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(h.to_array().len() + g.to_array().len(), 19);

        // period-2 vertical stripes spanning both extreme levels
        let stripes = GrayImage::from_fn(8, 8, |x, _| if x % 2 == 0 { 0 } else { 255 }).unwrap();
        let levels = 8;
        let q = quantize(&stripes, levels).unwrap();
        let horiz = glcm_features(&compute_glcm(&q, levels, &[(1, 0)], true, true).unwrap()).unwrap();
        assert!((horiz.contrast - 49.0).abs() < 1e-12);
        let vert = glcm_features(&compute_glcm(&q, levels, &[(0, 1)], true, true).unwrap()).unwrap();
        assert_eq!(vert.contrast, 0.0);
        let (avg, _) = texture_features_gray(&stripes, levels, 1).unwrap();
        assert!((avg.contrast - 0.75 * 49.0).abs() < 1e-12);
    }

    #[test]
    fn translation_invariance_on_torus() {
        // period-3 texture, cyclically shifted by one period keeps all pair counts
        let base = |x: usize, y: usize| ((x % 3) + 2 * (y % 3)) as u8 % 4;
        let a = GrayImage::from_fn(9, 9, base).unwrap();
        let b = GrayImage::from_fn(9, 9, |x, y| base((x + 3) % 9, (y + 3) % 9)).unwrap();
        for d in DIRECTIONS {
            assert_eq!(
                compute_glcm(&a, 4, &[d], true, false).unwrap(),
                compute_glcm(&b, 4, &[d], true, false).unwrap()
            );
        }
    }

    fn arb_small_image() -> impl Strategy<Value = (GrayImage, usize)> {
        (2usize..=8, 2usize..=8, 2usize..=4).prop_flat_map(|(w, h, levels)| {
            proptest::collection::vec(0..levels as u8, w * h)
                .prop_map(move |d| (GrayImage::new(w, h, d).unwrap(), levels))
        })
    }

    proptest! {
        #[test]
        fn glcm_matches_brute_force((im, levels) in arb_small_image(), dir in 0usize..4, sym in any::<bool>()) {
            let off = [DIRECTIONS[dir]];
            let m = compute_glcm(&im, levels, &off, sym, false).unwrap();
            let brute: Vec<f64> = brute_glcm(&im, levels, &off, sym).into_iter().map(|c| c as f64).collect();
            prop_assert_eq!(m.counts(), brute.as_slice());
            if sym {
                let t = m.transpose();
                prop_assert_eq!(t.counts(), m.counts());
            }
        }

        #[test]
        fn feature_invariants((im, levels) in arb_small_image()) {
            let m = compute_glcm(&im, levels, &DIRECTIONS, true, true).unwrap();
            prop_assert!((m.total() - 1.0).abs() < 1e-9);
            let f = glcm_features(&m).unwrap();
            let h = haralick_features(&m).unwrap();
            prop_assert!(f.asm > 0.0 && f.asm <= 1.0 + 1e-12);
            prop_assert!((f.energy - f.asm.sqrt()).abs() < 1e-15);
            prop_assert!(f.homogeneity > 0.0 && f.homogeneity <= 1.0 + 1e-12);
            prop_assert!((-1.0..=1.0).contains(&f.correlation));
            let point_mass = m.counts().contains(&1.0);
            prop_assert_eq!(f.asm >= 1.0 - 1e-12, point_mass);
            prop_assert!(h.entropy >= 0.0);
            prop_assert!((0.0..=1.0).contains(&h.info_correlation_2));
            prop_assert!((h.asm - f.asm).abs() < 1e-12 && (h.contrast - f.contrast).abs() < 1e-9);
            let recomputed: f64 = m.counts().iter().map(|v| v * v).sum();
            prop_assert!((recomputed - f.asm).abs() < 1e-9);
            prop_assert!(h.to_array().iter().chain(f.to_array().iter()).all(|v| v.is_finite()));
        }
    }
}
