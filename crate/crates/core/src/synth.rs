//! Procedural colour textures for demos and offline tests.
//!
//! Real benchmark corpora are large and carry their own licences, so the
//! examples and the test suite fall back on these. Every image is a pattern
//! (grating, checkerboard, blobs or plain noise) mapped through a two-colour
//! palette, with a random phase, lighting drift and additive noise.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::imagecore::RasterImage;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Pattern {
    /// Sinusoidal grating; `angle` in degrees, 0 = vertical stripes.
    Grating { period: f64, angle: f64 },
    Checker { cell: usize },
    /// Random discs on a plain background.
    Blobs { radius: f64, count: usize },
    /// Independent uniform noise per pixel.
    Noise,
    /// Uniform noise box-averaged over a `(2r+1)`² window, then stretched back to `[0, 1]`.
    SmoothNoise { radius: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TextureClass {
    pub name: String,
    pub pattern: Pattern,
    /// Colours at pattern value 0 and 1.
    pub palette: [[f64; 3]; 2],
    /// Standard deviation of the additive per-channel noise.
    pub noise: f64,
}

impl TextureClass {
    pub fn new(name: &str, pattern: Pattern, palette: [[f64; 3]; 2], noise: f64) -> Self {
        Self {
            name: name.to_string(),
            pattern,
            palette,
            noise,
        }
    }
}

const WARM: [[f64; 3]; 2] = [[70.0, 40.0, 30.0], [200.0, 150.0, 90.0]];
const COOL: [[f64; 3]; 2] = [[30.0, 50.0, 90.0], [140.0, 190.0, 220.0]];
const MOSS: [[f64; 3]; 2] = [[40.0, 70.0, 35.0], [160.0, 200.0, 110.0]];

/// Ten classes. Several share a palette and differ only in structure, so
/// colour statistics alone cannot separate all of them.
pub fn texture_classes() -> Vec<TextureClass> {
    vec![
        TextureClass::new("blobs_large", Pattern::Blobs { radius: 9.0, count: 8 }, MOSS, 10.0),
        TextureClass::new("blobs_small", Pattern::Blobs { radius: 3.0, count: 60 }, MOSS, 10.0),
        TextureClass::new("checker_4", Pattern::Checker { cell: 4 }, COOL, 12.0),
        TextureClass::new("checker_8", Pattern::Checker { cell: 8 }, COOL, 12.0),
        TextureClass::new("grating_p04", Pattern::Grating { period: 4.0, angle: 0.0 }, WARM, 10.0),
        TextureClass::new("grating_p08", Pattern::Grating { period: 8.0, angle: 0.0 }, WARM, 10.0),
        TextureClass::new("grating_p08_diag", Pattern::Grating { period: 8.0, angle: 45.0 }, WARM, 10.0),
        TextureClass::new("grating_p16", Pattern::Grating { period: 16.0, angle: 90.0 }, MOSS, 10.0),
        TextureClass::new("noise_fine", Pattern::Noise, COOL, 8.0),
        TextureClass::new("noise_smooth", Pattern::SmoothNoise { radius: 2 }, COOL, 8.0),
    ]
}

/// Pattern value in `[0, 1]` for every pixel, row-major.
fn pattern_field(pattern: Pattern, size: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = size * size;
    match pattern {
        Pattern::Grating { period, angle } => {
            let (s, c) = angle.to_radians().sin_cos();
            let phase = rng.random_range(0.0..2.0 * PI);
            (0..n)
                .map(|i| {
                    let (x, y) = ((i % size) as f64, (i / size) as f64);
                    0.5 + 0.5 * (2.0 * PI * (x * c + y * s) / period + phase).sin()
                })
                .collect()
        }
        Pattern::Checker { cell } => {
            let (ox, oy) = (rng.random_range(0..2 * cell), rng.random_range(0..2 * cell));
            (0..n)
                .map(|i| {
                    let (x, y) = (i % size + ox, i / size + oy);
                    ((x / cell + y / cell) % 2) as f64
                })
                .collect()
        }
        Pattern::Blobs { radius, count } => {
            let mut field = vec![0.0; n];
            for _ in 0..count {
                let cx = rng.random_range(0.0..size as f64);
                let cy = rng.random_range(0.0..size as f64);
                for (i, v) in field.iter_mut().enumerate() {
                    let (dx, dy) = ((i % size) as f64 - cx, (i / size) as f64 - cy);
                    if dx * dx + dy * dy <= radius * radius {
                        *v = 1.0;
                    }
                }
            }
            field
        }
        Pattern::Noise => (0..n).map(|_| rng.random::<f64>()).collect(),
        Pattern::SmoothNoise { radius } => {
            let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let r = radius as isize;
            let at = |x: isize, y: isize| raw[y.rem_euclid(size as isize) as usize * size + x.rem_euclid(size as isize) as usize];
            let smooth: Vec<f64> = (0..n)
                .map(|i| {
                    let (x, y) = ((i % size) as isize, (i / size) as isize);
                    let mut acc = 0.0;
                    for dy in -r..=r {
                        for dx in -r..=r {
                            acc += at(x + dx, y + dy);
                        }
                    }
                    acc
                })
                .collect();
            let lo = smooth.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = smooth.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            smooth.iter().map(|v| (v - lo) / (hi - lo).max(f64::EPSILON)).collect()
        }
    }
}

/// Renders one `size`×`size` sample of `class`.
pub fn render(class: &TextureClass, size: usize, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = pattern_field(class.pattern, size, &mut rng);
    // per-image lighting drift: brightness offset and contrast gain
    let jitter = rng.random_range(-25.0..25.0);
    let gain = rng.random_range(0.6..1.0);
    let noise = Normal::new(0.0, class.noise).expect("finite noise level");
    let [lo, hi] = class.palette;
    RasterImage::from_fn_rgb(size, size, |x, y| {
        let t = field[y * size + x];
        std::array::from_fn(|c| {
            let v = lo[c] + gain * t * (hi[c] - lo[c]) + jitter + noise.sample(&mut rng);
            v.round().clamp(0.0, 255.0) as u8
        })
    })
    .expect("valid dimensions")
}

/// Writes `per_class` PNGs per class under `root/<class>/NNN.png`.
pub fn write_corpus(root: &Path, classes: &[TextureClass], per_class: usize, size: usize, seed: u64) -> Result<()> {
    for (ci, class) in classes.iter().enumerate() {
        let dir = root.join(&class.name);
        fs::create_dir_all(&dir)?;
        for k in 0..per_class {
            let img_seed = seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add((ci as u64) << 32 | k as u64);
            let png = render(class, size, img_seed).to_png()?;
            fs::write(dir.join(format!("{k:03}.png")), png)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_is_deterministic() {
        let classes = texture_classes();
        for c in &classes {
            assert_eq!(render(c, 32, 7), render(c, 32, 7));
            assert_ne!(render(c, 32, 7), render(c, 32, 8), "{}", c.name);
        }
    }

    #[test]
    fn class_names_are_unique_and_sorted() {
        let names: Vec<_> = texture_classes().into_iter().map(|c| c.name).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(names, sorted);
    }

    #[test]
    fn corpus_layout() {
        let dir = tempfile::tempdir().unwrap();
        let classes = &texture_classes()[..2];
        write_corpus(dir.path(), classes, 3, 16, 1).unwrap();
        let corpus = crate::dataset::scan_corpus(dir.path()).unwrap();
        assert_eq!(corpus.len(), 6);
        assert_eq!(corpus.classes, ["blobs_large", "blobs_small"]);
    }
}
