//! Gaussian and Laplacian pyramids built with the 5-tap binomial generating kernel.
//!
//! All arithmetic happens on [`Plane`]s of `f64` samples. Borders are mirrored
//! without repeating the edge sample (`dcb|abcd|cba`), and level `l` of a
//! pyramid has `ceil(dim / 2^l)` samples along each axis, with output sample
//! `x` centred on input sample `2x`.

use crate::error::{Error, Result};
use crate::imagecore::GrayImage;

/// Normalized 1-D binomial taps `[1, 4, 6, 4, 1] / 16`, i.e. `(1/4, 1/2, 1/4)` applied twice.
pub const BINOMIAL_TAPS: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// The 5x5 generating kernel `w(m, n)`, the outer product of [`BINOMIAL_TAPS`] with itself.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel2D {
    weights: [[f64; 5]; 5],
}

impl Kernel2D {
    pub fn binomial() -> Self {
        let mut weights = [[0.0; 5]; 5];
        for (row, &wm) in weights.iter_mut().zip(&BINOMIAL_TAPS) {
            for (cell, &wn) in row.iter_mut().zip(&BINOMIAL_TAPS) {
                *cell = wm * wn;
            }
        }
        Self { weights }
    }

    /// Weight at offset `(m, n)`, both in `-2..=2`.
    pub fn weight(&self, m: isize, n: isize) -> f64 {
        self.weights[(m + 2) as usize][(n + 2) as usize]
    }

    pub fn weights(&self) -> &[[f64; 5]; 5] {
        &self.weights
    }
}

impl Default for Kernel2D {
    fn default() -> Self {
        Self::binomial()
    }
}

/// Real-valued single-channel image.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{width}x{height} plane with {} samples",
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn from_gray(img: &GrayImage) -> Self {
        Self {
            width: img.width(),
            height: img.height(),
            data: img.data().iter().map(|&v| f64::from(v)).collect(),
        }
    }

    /// Rounds to nearest and clamps to `[0, 255]`.
    pub fn to_gray(&self) -> GrayImage {
        let data = self.data.iter().map(|&v| v.round().clamp(0.0, 255.0) as u8).collect();
        GrayImage::new(self.width, self.height, data).expect("plane dimensions are valid")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn max_abs_diff(&self, other: &Plane) -> f64 {
        assert_eq!(self.dims(), other.dims());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn zip_with(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Result<Plane> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Plane { data, ..*self })
    }
}

/// Mirror index `i` into `0..n` without repeating the edge sample.
#[inline]
pub(crate) fn reflect(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let r = i.rem_euclid(period);
    if r >= n as isize {
        (period - r) as usize
    } else {
        r as usize
    }
}

#[inline]
fn half_ceil(n: usize) -> usize {
    n.div_ceil(2)
}

/// One REDUCE step: blur with the generating kernel, keep every second sample.
pub fn gaussian_reduce(img: &Plane) -> Result<Plane> {
    let (w, h) = img.dims();
    if w < 2 || h < 2 {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            reason: "reduce needs at least 2x2".into(),
        });
    }
    let (ow, oh) = (half_ceil(w), half_ceil(h));

    // horizontal pass over every input row
    let mut tmp = vec![0.0; ow * h];
    for y in 0..h {
        let row = &img.data[y * w..(y + 1) * w];
        for x in 0..ow {
            let cx = 2 * x as isize;
            tmp[y * ow + x] = BINOMIAL_TAPS
                .iter()
                .enumerate()
                .map(|(k, &t)| t * row[reflect(cx + k as isize - 2, w)])
                .sum();
        }
    }

    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        let cy = 2 * y as isize;
        for (k, &t) in BINOMIAL_TAPS.iter().enumerate() {
            let src = reflect(cy + k as isize - 2, h);
            let src_row = &tmp[src * ow..(src + 1) * ow];
            for (o, &s) in out[y * ow..(y + 1) * ow].iter_mut().zip(src_row) {
                *o += t * s;
            }
        }
    }
    Plane::new(ow, oh, out)
}

/// Gaussian levels, index 0 being the input.
#[derive(Clone, Debug, PartialEq)]
pub struct PyramidLevelSet {
    levels: Vec<Plane>,
}

impl PyramidLevelSet {
    pub fn levels(&self) -> &[Plane] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, l: usize) -> &Plane {
        &self.levels[l]
    }

    pub fn into_levels(self) -> Vec<Plane> {
        self.levels
    }

    /// Every level rounded back to 8 bits.
    pub fn to_gray_levels(&self) -> Vec<GrayImage> {
        self.levels.iter().map(Plane::to_gray).collect()
    }
}

/// Checks that a `width x height` image supports `n_levels` pyramid levels.
pub fn check_pyramid_size(width: usize, height: usize, n_levels: usize) -> Result<()> {
    if n_levels == 0 {
        return Err(Error::InvalidParameter("pyramid needs at least one level".into()));
    }
    if n_levels == 1 {
        return Ok(());
    }
    let top = |d: usize| d.div_ceil(1 << (n_levels - 1));
    if n_levels > usize::BITS as usize || top(width) < 2 || top(height) < 2 {
        return Err(Error::ImageTooSmall {
            width,
            height,
            reason: format!("{n_levels} pyramid levels need a top level of at least 2x2"),
        });
    }
    Ok(())
}

pub fn build_gaussian_pyramid(img: &Plane, n_levels: usize) -> Result<PyramidLevelSet> {
    check_pyramid_size(img.width, img.height, n_levels)?;
    let mut levels = Vec::with_capacity(n_levels);
    levels.push(img.clone());
    for l in 1..n_levels {
        let next = gaussian_reduce(&levels[l - 1])?;
        levels.push(next);
    }
    Ok(PyramidLevelSet { levels })
}

/// Convenience wrapper: 8-bit in, 8-bit levels out (one rounding per level).
pub fn gray_pyramid(img: &GrayImage, n_levels: usize) -> Result<Vec<GrayImage>> {
    Ok(build_gaussian_pyramid(&Plane::from_gray(img), n_levels)?.to_gray_levels())
}

/// One EXPAND step: zero-interleave to `target_w x target_h`, then blur with `4 * w(m, n)`.
pub fn expand(img: &Plane, target_w: usize, target_h: usize) -> Result<Plane> {
    let (w, h) = img.dims();
    let fits = |t: usize, d: usize| t == 2 * d || t + 1 == 2 * d;
    if !fits(target_w, w) || !fits(target_h, h) {
        return Err(Error::InvalidTargetSize {
            width: w,
            height: h,
            target_w,
            target_h,
        });
    }
    // On the interleaved grid a sample is non-zero iff its (mirrored) index is even;
    // mirroring preserves parity on both edges, so the DC gain is exactly 1 everywhere.
    let gather = |pos: usize, n_up: usize| {
        let mut taps = Vec::with_capacity(3);
        for (k, &t) in BINOMIAL_TAPS.iter().enumerate() {
            let j = reflect(pos as isize + k as isize - 2, n_up);
            if j.is_multiple_of(2) {
                taps.push((j / 2, 2.0 * t));
            }
        }
        taps
    };

    let mut tmp = vec![0.0; target_w * h];
    let col_taps: Vec<_> = (0..target_w).map(|x| gather(x, target_w)).collect();
    for y in 0..h {
        let row = &img.data[y * w..(y + 1) * w];
        for (x, taps) in col_taps.iter().enumerate() {
            tmp[y * target_w + x] = taps.iter().map(|&(j, t)| t * row[j]).sum();
        }
    }

    let mut out = vec![0.0; target_w * target_h];
    for y in 0..target_h {
        for (src, t) in gather(y, target_h) {
            let src_row = &tmp[src * target_w..(src + 1) * target_w];
            for (o, &s) in out[y * target_w..(y + 1) * target_w].iter_mut().zip(src_row) {
                *o += t * s;
            }
        }
    }
    Plane::new(target_w, target_h, out)
}

/// Band-pass level `b_k = G_k - expand(G_{k+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianLevel {
    pub band: Plane,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianPyramid {
    pub bands: Vec<LaplacianLevel>,
    /// The coarsest Gaussian level.
    pub residual: Plane,
}

pub fn build_laplacian_pyramid(gp: &PyramidLevelSet) -> Result<LaplacianPyramid> {
    if gp.len() < 2 {
        return Err(Error::InvalidParameter("laplacian pyramid needs at least 2 gaussian levels".into()));
    }
    let bands = gp
        .levels
        .windows(2)
        .map(|pair| {
            let (fine, coarse) = (&pair[0], &pair[1]);
            let up = expand(coarse, fine.width, fine.height)?;
            Ok(LaplacianLevel {
                band: fine.zip_with(&up, |a, b| a - b)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LaplacianPyramid {
        bands,
        residual: gp.levels.last().cloned().expect("checked length"),
    })
}

impl LaplacianPyramid {
    /// Collapses the pyramid back to the finest level.
    pub fn reconstruct(&self) -> Result<Plane> {
        let mut acc = self.residual.clone();
        for level in self.bands.iter().rev() {
            let up = expand(&acc, level.band.width, level.band.height)?;
            acc = level.band.zip_with(&up, |b, u| b + u)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct double sum over the 5x5 kernel with explicit mirroring.
    fn naive_reduce(img: &Plane) -> Plane {
        let k = Kernel2D::binomial();
        let (ow, oh) = (img.width.div_ceil(2), img.height.div_ceil(2));
        Plane::from_fn(ow, oh, |x, y| {
            let mut acc = 0.0;
            for m in -2isize..=2 {
                for n in -2isize..=2 {
                    let sx = reflect(2 * x as isize + m, img.width);
                    let sy = reflect(2 * y as isize + n, img.height);
                    acc += k.weight(m, n) * img.get(sx, sy);
                }
            }
            acc
        })
        .unwrap()
    }

    /// Materialized zero-interleaved grid followed by a direct 5x5 convolution with 4w.
    fn naive_expand(img: &Plane, tw: usize, th: usize) -> Plane {
        let k = Kernel2D::binomial();
        let up = Plane::from_fn(tw, th, |x, y| {
            if x % 2 == 0 && y % 2 == 0 {
                img.get(x / 2, y / 2)
            } else {
                0.0
            }
        })
        .unwrap();
        Plane::from_fn(tw, th, |x, y| {
            let mut acc = 0.0;
            for m in -2isize..=2 {
                for n in -2isize..=2 {
                    let sx = reflect(x as isize + m, tw);
                    let sy = reflect(y as isize + n, th);
                    acc += 4.0 * k.weight(m, n) * up.get(sx, sy);
                }
            }
            acc
        })
        .unwrap()
    }

    #[test]
    fn reflect_indices() {
        assert_eq!(reflect(-1, 5), 1);
        assert_eq!(reflect(-2, 5), 2);
        assert_eq!(reflect(5, 5), 3);
        assert_eq!(reflect(6, 5), 2);
        assert_eq!(reflect(-2, 2), 0);
        assert_eq!(reflect(3, 2), 1);
        assert_eq!(reflect(-7, 1), 0);
    }

    #[test]
    fn kernel_properties() {
        let k = Kernel2D::binomial();
        let total: f64 = k.weights().iter().flatten().sum();
        assert!((total - 1.0).abs() < 1e-12);
        // exact in units of 1/256
        let units: u32 = k.weights().iter().flatten().map(|w| (w * 256.0) as u32).sum();
        assert_eq!(units, 256);
        for m in -2..=2 {
            for n in -2..=2 {
                assert_eq!(k.weight(m, n), k.weight(-m, n));
                assert_eq!(k.weight(m, n), k.weight(m, -n));
                assert_eq!(k.weight(m, n), BINOMIAL_TAPS[(m + 2) as usize] * BINOMIAL_TAPS[(n + 2) as usize]);
            }
        }
        // 3-tap (1/4, 1/2, 1/4) applied twice gives the 5-tap kernel
        let three = [0.25, 0.5, 0.25];
        let mut twice = [0.0; 5];
        for (i, a) in three.iter().enumerate() {
            for (j, b) in three.iter().enumerate() {
                twice[i + j] += a * b;
            }
        }
        assert_eq!(twice, BINOMIAL_TAPS);
    }

    #[test]
    fn reduce_constant_is_fixed_point() {
        for (w, h) in [(2, 2), (3, 5), (7, 4), (16, 16)] {
            let p = Plane::new(w, h, vec![42.0; w * h]).unwrap();
            let r = gaussian_reduce(&p).unwrap();
            assert!(r.data().iter().all(|&v| v == 42.0), "{w}x{h}");
        }
    }

    #[test]
    fn reduce_ramp_matches_naive() {
        let ramp = Plane::from_fn(4, 4, |x, y| (x + 4 * y) as f64).unwrap();
        let fast = gaussian_reduce(&ramp).unwrap();
        let slow = naive_reduce(&ramp);
        assert_eq!(fast.dims(), (2, 2));
        assert!(fast.max_abs_diff(&slow) < 1e-12);
        // mirrored ramp: columns {-2..2} -> {2,1,0,1,2}, so x=0 averages to 12/16
        assert!((fast.get(0, 0) - (0.75 + 4.0 * 0.75)).abs() < 1e-12);
    }

    #[test]
    fn reduce_too_small() {
        let p = Plane::new(1, 4, vec![0.0; 4]).unwrap();
        assert!(matches!(gaussian_reduce(&p), Err(Error::ImageTooSmall { .. })));
    }

    #[test]
    fn pyramid_dims() {
        let p = Plane::new(200, 200, vec![1.0; 40000]).unwrap();
        let gp = build_gaussian_pyramid(&p, 3).unwrap();
        let dims: Vec<_> = gp.levels().iter().map(Plane::dims).collect();
        assert_eq!(dims, vec![(200, 200), (100, 100), (50, 50)]);
        assert!(gp.levels().iter().all(|l| l.data().iter().all(|&v| v == 1.0)));

        let one = build_gaussian_pyramid(&p, 1).unwrap();
        assert_eq!(one.levels(), std::slice::from_ref(&p));

        let odd = Plane::new(13, 9, vec![0.0; 117]).unwrap();
        let gp = build_gaussian_pyramid(&odd, 3).unwrap();
        let dims: Vec<_> = gp.levels().iter().map(Plane::dims).collect();
        assert_eq!(dims, vec![(13, 9), (7, 5), (4, 3)]);

        assert!(build_gaussian_pyramid(&odd, 0).is_err());
        let tiny = Plane::new(4, 4, vec![0.0; 16]).unwrap();
        assert!(matches!(build_gaussian_pyramid(&tiny, 3), Err(Error::ImageTooSmall { .. })));
    }

    #[test]
    fn expand_examples() {
        let c = Plane::new(2, 2, vec![9.5; 4]).unwrap();
        let e = expand(&c, 4, 4).unwrap();
        assert_eq!(e.dims(), (4, 4));
        assert!(e.data().iter().all(|&v| (v - 9.5).abs() < 1e-12));
        let e = expand(&c, 3, 4).unwrap();
        assert!(e.data().iter().all(|&v| (v - 9.5).abs() < 1e-12));

        let ramp = Plane::from_fn(3, 3, |x, y| (x * 3 + y * 7) as f64).unwrap();
        let fast = expand(&ramp, 6, 6).unwrap();
        assert!(fast.max_abs_diff(&naive_expand(&ramp, 6, 6)) < 1e-12);
        let fast = expand(&ramp, 5, 6).unwrap();
        assert!(fast.max_abs_diff(&naive_expand(&ramp, 5, 6)) < 1e-12);

        assert!(matches!(expand(&ramp, 7, 6), Err(Error::InvalidTargetSize { .. })));
        assert!(matches!(expand(&ramp, 6, 4), Err(Error::InvalidTargetSize { .. })));
    }

    #[test]
    fn laplacian_of_constant() {
        let p = Plane::new(12, 10, vec![77.0; 120]).unwrap();
        let lp = build_laplacian_pyramid(&build_gaussian_pyramid(&p, 3).unwrap()).unwrap();
        assert_eq!(lp.bands.len(), 2);
        for b in &lp.bands {
            assert!(b.band.data().iter().all(|v| v.abs() < 1e-12));
        }
        assert!(lp.residual.data().iter().all(|&v| v == 77.0));
    }

    #[test]
    fn laplacian_needs_two_levels() {
        let p = Plane::new(4, 4, vec![0.0; 16]).unwrap();
        let gp = build_gaussian_pyramid(&p, 1).unwrap();
        assert!(build_laplacian_pyramid(&gp).is_err());
    }

    fn arb_plane(max: usize) -> impl Strategy<Value = Plane> {
        (2..=max, 2..=max).prop_flat_map(|(w, h)| {
            proptest::collection::vec(0.0..255.0f64, w * h).prop_map(move |d| Plane::new(w, h, d).unwrap())
        })
    }

    proptest! {
        #[test]
        fn reduce_matches_double_sum(p in arb_plane(12)) {
            prop_assert!(gaussian_reduce(&p).unwrap().max_abs_diff(&naive_reduce(&p)) < 1e-9);
        }

        #[test]
        fn expand_matches_naive(p in arb_plane(8), dw in 0usize..2, dh in 0usize..2) {
            let (tw, th) = (2 * p.width() - dw, 2 * p.height() - dh);
            prop_assert!(expand(&p, tw, th).unwrap().max_abs_diff(&naive_expand(&p, tw, th)) < 1e-9);
        }

        #[test]
        fn reduce_stays_in_range(p in arb_plane(16)) {
            let lo = p.data().iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = p.data().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let r = gaussian_reduce(&p).unwrap();
            prop_assert!(r.data().iter().all(|&v| v >= lo - 1e-9 && v <= hi + 1e-9));
        }

        #[test]
        fn laplacian_reconstructs(p in arb_plane(24).prop_filter("3 levels", |p| p.width() > 4 && p.height() > 4)) {
            let gp = build_gaussian_pyramid(&p, 3).unwrap();
            let lp = build_laplacian_pyramid(&gp).unwrap();
            prop_assert!(lp.reconstruct().unwrap().max_abs_diff(&p) < 1e-9);
        }
    }
}
