//! TiO feature extraction: Gaussian pyramid, channel split, four descriptor
//! families per level, concatenated under a versioned [`FeatureSchema`].
//!
//! Schema order is family-major so that every descriptor family occupies a
//! contiguous slice of the vector:
//!
//! ```text
//! bit      level L0..L2 x channel R,G,B x 14
//! haralick level L0..L2 x channel R,G,B x 13
//! glcm     level L0..L2 x channel R,G,B x 6
//! info     level L0..L2 x RGB x 6
//! ```
//!
//! With three levels that is 126 + 117 + 54 + 18 = 315 values.

use std::fmt;
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bitdesc::{bit_block, BitFeatures};
use crate::cooccur::{texture_features_gray, GlcmFeatures, HaralickFeatures};
use crate::dataset::CorpusItem;
use crate::error::{Error, Result};
use crate::imagecore::{decode_image, split_channels, GrayImage, RasterImage};
use crate::infotheory::{info_block, INFO_NAMES};
use crate::pyramid::{build_gaussian_pyramid, check_pyramid_size, Plane};

pub const SCHEMA_VERSION: &str = "tio-v1";

/// Smallest accepted input side.
pub const MIN_IMAGE_SIDE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Bit,
    Haralick,
    Glcm,
    Info,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Bit, Family::Haralick, Family::Glcm, Family::Info];

    /// Values per (level, channel) block.
    pub fn block_len(self) -> usize {
        match self {
            Family::Bit => 14,
            Family::Haralick => 13,
            Family::Glcm => 6,
            Family::Info => 6,
        }
    }

    pub fn channels(self) -> &'static [Channel] {
        match self {
            Family::Info => &[Channel::Joint],
            _ => &[Channel::R, Channel::G, Channel::B],
        }
    }

    pub fn value_names(self) -> &'static [&'static str] {
        match self {
            Family::Bit => &BitFeatures::NAMES,
            Family::Haralick => &HaralickFeatures::NAMES,
            Family::Glcm => &GlcmFeatures::NAMES,
            Family::Info => &INFO_NAMES,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Bit => "bit",
            Family::Haralick => "haralick",
            Family::Glcm => "glcm",
            Family::Info => "info",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown descriptor family {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    R,
    G,
    B,
    /// The three channels taken together (information block).
    Joint,
}

impl Channel {
    pub fn as_str(self) -> &'static str {
        match self {
            Channel::R => "R",
            Channel::G => "G",
            Channel::B => "B",
            Channel::Joint => "RGB",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaEntry {
    pub family: Family,
    pub level: usize,
    pub channel: Channel,
    pub index: usize,
}

impl SchemaEntry {
    pub fn column_name(&self) -> String {
        format!(
            "{}_L{}_{}_{}",
            self.family,
            self.level,
            self.channel,
            self.family.value_names()[self.index]
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureSchema {
    version: String,
    n_levels: usize,
    entries: Vec<SchemaEntry>,
}

impl FeatureSchema {
    pub fn new(n_levels: usize) -> Self {
        let mut entries = Vec::new();
        for family in Family::ALL {
            for level in 0..n_levels {
                for &channel in family.channels() {
                    for index in 0..family.block_len() {
                        entries.push(SchemaEntry {
                            family,
                            level,
                            channel,
                            index,
                        });
                    }
                }
            }
        }
        Self {
            version: SCHEMA_VERSION.to_string(),
            n_levels,
            entries,
        }
    }

    /// Recovers the schema from CSV feature column names; the columns must
    /// match a generated schema exactly, in order.
    pub fn from_columns<S: AsRef<str>>(columns: &[S]) -> Result<Self> {
        let per_level: usize = Family::ALL.iter().map(|f| f.block_len() * f.channels().len()).sum();
        if columns.is_empty() || !columns.len().is_multiple_of(per_level) {
            return Err(Error::SchemaMismatch(format!(
                "{} feature columns is not a multiple of {per_level}",
                columns.len()
            )));
        }
        let schema = Self::new(columns.len() / per_level);
        for (i, (entry, got)) in schema.entries.iter().zip(columns).enumerate() {
            let expected = entry.column_name();
            if expected != got.as_ref() {
                return Err(Error::SchemaMismatch(format!(
                    "column {i}: expected {expected:?}, found {:?}",
                    got.as_ref()
                )));
            }
        }
        Ok(schema)
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn entries(&self) -> &[SchemaEntry] {
        &self.entries
    }

    pub fn total_dims(&self) -> usize {
        self.entries.len()
    }

    pub fn column_names(&self) -> Vec<String> {
        self.entries.iter().map(SchemaEntry::column_name).collect()
    }

    pub fn family_dims(&self, family: Family) -> usize {
        family.block_len() * family.channels().len() * self.n_levels
    }

    /// Contiguous index range covered by one family.
    pub fn family_range(&self, family: Family) -> Range<usize> {
        let start: usize = Family::ALL
            .iter()
            .take_while(|&&f| f != family)
            .map(|&f| self.family_dims(f))
            .sum();
        start..start + self.family_dims(family)
    }

    /// Index range of one (family, level, channel) block.
    pub fn block_range(&self, family: Family, level: usize, channel: Channel) -> Option<Range<usize>> {
        let ch = family.channels().iter().position(|&c| c == channel)?;
        if level >= self.n_levels {
            return None;
        }
        let start = self.family_range(family).start + (level * family.channels().len() + ch) * family.block_len();
        Some(start..start + family.block_len())
    }

    /// Indices selected by a descriptor subset, in schema order.
    pub fn subset_indices(&self, subset: DescriptorSubset) -> Vec<usize> {
        match subset.family() {
            None => (0..self.total_dims()).collect(),
            Some(f) => self.family_range(f).collect(),
        }
    }

    /// Plain-text manifest describing every column, one per line.
    pub fn manifest(&self) -> String {
        let mut out = format!("# schema {}\n# levels {}\n# dims {}\n", self.version, self.n_levels, self.total_dims());
        out.push_str("index,column,family,level,channel,position\n");
        for (i, e) in self.entries.iter().enumerate() {
            out.push_str(&format!(
                "{i},{},{},L{},{},{}\n",
                e.column_name(),
                e.family,
                e.level,
                e.channel,
                e.index
            ));
        }
        out
    }
}

/// Column subsets used by ablation runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DescriptorSubset {
    Tio,
    Bit,
    Glcm,
    Haralick,
    Info,
}

impl DescriptorSubset {
    pub const ALL: [DescriptorSubset; 5] = [
        DescriptorSubset::Tio,
        DescriptorSubset::Bit,
        DescriptorSubset::Glcm,
        DescriptorSubset::Haralick,
        DescriptorSubset::Info,
    ];

    pub fn family(self) -> Option<Family> {
        match self {
            DescriptorSubset::Tio => None,
            DescriptorSubset::Bit => Some(Family::Bit),
            DescriptorSubset::Glcm => Some(Family::Glcm),
            DescriptorSubset::Haralick => Some(Family::Haralick),
            DescriptorSubset::Info => Some(Family::Info),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DescriptorSubset::Tio => "tio",
            DescriptorSubset::Bit => "bit",
            DescriptorSubset::Glcm => "glcm",
            DescriptorSubset::Haralick => "haralick",
            DescriptorSubset::Info => "info",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            DescriptorSubset::Tio => "TiO",
            DescriptorSubset::Bit => "BiT",
            DescriptorSubset::Glcm => "GLCM",
            DescriptorSubset::Haralick => "Haralick",
            DescriptorSubset::Info => "Info",
        }
    }
}

impl fmt::Display for DescriptorSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DescriptorSubset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown descriptor subset {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ExtractionConfig {
    pub glcm_levels: usize,
    pub glcm_distance: u32,
    pub pyramid_levels: usize,
    pub schema_version: String,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            glcm_levels: 8,
            glcm_distance: 1,
            pyramid_levels: 3,
            schema_version: SCHEMA_VERSION.to_string(),
        }
    }
}

impl ExtractionConfig {
    pub fn schema(&self) -> FeatureSchema {
        FeatureSchema::new(self.pyramid_levels)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported schema version {:?} (this build writes {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !(2..=256).contains(&self.glcm_levels) {
            return Err(Error::InvalidLevelCount(self.glcm_levels));
        }
        if self.glcm_distance == 0 {
            return Err(Error::InvalidParameter("GLCM distance must be at least 1".into()));
        }
        if self.pyramid_levels == 0 {
            return Err(Error::InvalidParameter("at least one pyramid level is required".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub schema_version: String,
    pub source_id: String,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One pyramid level split into its R, G and B planes.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelChannels {
    pub r: GrayImage,
    pub g: GrayImage,
    pub b: GrayImage,
}

impl LevelChannels {
    pub fn channel(&self, c: Channel) -> Option<&GrayImage> {
        match c {
            Channel::R => Some(&self.r),
            Channel::G => Some(&self.g),
            Channel::B => Some(&self.b),
            Channel::Joint => None,
        }
    }
}

/// Splits the image, builds one floating point pyramid per channel and
/// rounds every level back to 8 bits.
pub fn color_pyramid(img: &RasterImage, n_levels: usize) -> Result<Vec<LevelChannels>> {
    let rgb = img.clone().into_rgb();
    check_pyramid_size(rgb.width(), rgb.height(), n_levels)?;
    let (r, g, b) = split_channels(&rgb)?;
    let pyr = |c: &GrayImage| build_gaussian_pyramid(&Plane::from_gray(c), n_levels).map(|p| p.to_gray_levels());
    let (r, g, b) = (pyr(&r)?, pyr(&g)?, pyr(&b)?);
    Ok(r
        .into_iter()
        .zip(g)
        .zip(b)
        .map(|((r, g), b)| LevelChannels { r, g, b })
        .collect())
}

fn check_input(img: &RasterImage, config: &ExtractionConfig) -> Result<()> {
    config.validate()?;
    if img.width() < MIN_IMAGE_SIDE || img.height() < MIN_IMAGE_SIDE {
        return Err(Error::ImageTooSmall {
            width: img.width(),
            height: img.height(),
            reason: format!("feature extraction needs at least {MIN_IMAGE_SIDE}x{MIN_IMAGE_SIDE}"),
        });
    }
    check_pyramid_size(img.width(), img.height(), config.pyramid_levels)
}

fn with_context<T>(r: Result<T>, source_id: &str, level: usize, channel: Channel) -> Result<T> {
    r.map_err(|cause| Error::Extraction {
        source_id: source_id.to_string(),
        level: format!("L{level}"),
        channel: channel.to_string(),
        cause: Box::new(cause),
    })
}

/// Computes the full TiO vector for one image.
pub fn extract_tio(img: &RasterImage, config: &ExtractionConfig, source_id: &str) -> Result<FeatureVector> {
    check_input(img, config)?;
    let schema = config.schema();
    let levels = color_pyramid(img, config.pyramid_levels)?;
    let mut values = vec![f64::NAN; schema.total_dims()];
    for (level, lc) in levels.iter().enumerate() {
        for channel in [Channel::R, Channel::G, Channel::B] {
            let plane = lc.channel(channel).expect("single channel");
            let bit = with_context(bit_block(plane), source_id, level, channel)?;
            let (glcm, haralick) = with_context(
                texture_features_gray(plane, config.glcm_levels, config.glcm_distance),
                source_id,
                level,
                channel,
            )?;
            let put = |values: &mut Vec<f64>, family, block: &[f64]| {
                let range = schema.block_range(family, level, channel).expect("schema block");
                values[range].copy_from_slice(block);
            };
            put(&mut values, Family::Bit, &bit.to_array());
            put(&mut values, Family::Haralick, &haralick.to_array());
            put(&mut values, Family::Glcm, &glcm.to_array());
        }
        let info = with_context(info_block(&lc.r, &lc.g, &lc.b), source_id, level, Channel::Joint)?;
        let range = schema.block_range(Family::Info, level, Channel::Joint).expect("schema block");
        values[range].copy_from_slice(&info);
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Extraction {
            source_id: source_id.to_string(),
            level: format!("L{}", schema.entries()[i].level),
            channel: schema.entries()[i].channel.to_string(),
            cause: Box::new(Error::InvalidParameter(format!(
                "non-finite value in {}",
                schema.entries()[i].column_name()
            ))),
        });
    }
    Ok(FeatureVector {
        values,
        schema_version: schema.version().to_string(),
        source_id: source_id.to_string(),
    })
}

/// Computes a single (family, level, channel) block.
pub fn extract_block(
    img: &RasterImage,
    config: &ExtractionConfig,
    family: Family,
    level: usize,
    channel: Channel,
) -> Result<Vec<f64>> {
    check_input(img, config)?;
    if level >= config.pyramid_levels || !family.channels().contains(&channel) {
        return Err(Error::InvalidParameter(format!(
            "no {family} block at L{level}/{channel} with {} levels",
            config.pyramid_levels
        )));
    }
    let levels = color_pyramid(img, level + 1)?;
    let lc = &levels[level];
    let out = match family {
        Family::Info => info_block(&lc.r, &lc.g, &lc.b)?.to_vec(),
        Family::Bit => bit_block(lc.channel(channel).expect("single channel"))?.to_array().to_vec(),
        Family::Haralick | Family::Glcm => {
            let plane = lc.channel(channel).expect("single channel");
            let (g, h) = texture_features_gray(plane, config.glcm_levels, config.glcm_distance)?;
            if family == Family::Glcm {
                g.to_array().to_vec()
            } else {
                h.to_array().to_vec()
            }
        }
    };
    with_context(Ok(out), "", level, channel)
}

/// Every block of one family, in schema order.
pub fn extract_family(img: &RasterImage, config: &ExtractionConfig, family: Family) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(config.schema().family_dims(family));
    for level in 0..config.pyramid_levels {
        for &channel in family.channels() {
            out.extend(extract_block(img, config, family, level, channel)?);
        }
    }
    Ok(out)
}

/// Result of extracting a whole corpus.
#[derive(Debug, Default)]
pub struct CorpusFeatures {
    /// Successfully processed items, ordered by source id.
    pub rows: Vec<(CorpusItem, FeatureVector)>,
    /// `(source_id, message)` for every failed item, ordered by source id.
    pub failures: Vec<(String, String)>,
}

/// Decodes and extracts every item with a pool of `jobs` workers (0 = all cores).
///
/// A failing image is reported in `failures` and does not stop the batch.
pub fn extract_corpus(items: &[CorpusItem], config: &ExtractionConfig, jobs: usize) -> Result<CorpusFeatures> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let results: Vec<_> = pool.install(|| {
        items
            .par_iter()
            .map(|item| (item, extract_path(&item.path, config, &item.source_id)))
            .collect()
    });
    let mut out = CorpusFeatures::default();
    for (item, res) in results {
        match res {
            Ok(v) => out.rows.push((item.clone(), v)),
            Err(e) => out.failures.push((item.source_id.clone(), e.to_string())),
        }
    }
    out.rows.sort_by(|a, b| a.0.source_id.cmp(&b.0.source_id));
    out.failures.sort();
    Ok(out)
}

fn extract_path(path: &Path, config: &ExtractionConfig, source_id: &str) -> Result<FeatureVector> {
    let bytes = std::fs::read(path)?;
    let img = decode_image(&bytes).map_err(|e| Error::Extraction {
        source_id: source_id.to_string(),
        level: "-".into(),
        channel: "-".into(),
        cause: Box::new(e),
    })?;
    extract_tio(&img, config, source_id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(w: usize, h: usize, seed: u64) -> RasterImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        RasterImage::from_fn_rgb(w, h, |_, _| rng.random()).unwrap()
    }

    #[test]
    fn schema_accounting() {
        let s = FeatureSchema::new(3);
        assert_eq!(s.total_dims(), 315);
        assert_eq!(s.family_dims(Family::Bit), 126);
        assert_eq!(s.family_dims(Family::Haralick), 117);
        assert_eq!(s.family_dims(Family::Glcm), 54);
        assert_eq!(s.family_dims(Family::Info), 18);
        assert_eq!(s.family_range(Family::Glcm), 243..297);
        assert_eq!(s.block_range(Family::Bit, 1, Channel::G), Some(56..70));
        assert_eq!(s.block_range(Family::Info, 2, Channel::Joint), Some(309..315));
        assert_eq!(s.block_range(Family::Info, 0, Channel::R), None);
        let names = s.column_names();
        assert_eq!(names[0], "bit_L0_R_margalef");
        assert_eq!(names[314], "info_L2_RGB_MI_GB");
        let unique: std::collections::HashSet<_> = names.iter().collect();
        assert_eq!(unique.len(), 315);
        assert_eq!(FeatureSchema::from_columns(&names).unwrap(), s);
        let mut bad = names.clone();
        bad.swap(0, 1);
        assert!(matches!(FeatureSchema::from_columns(&bad), Err(Error::SchemaMismatch(_))));
        assert!(FeatureSchema::from_columns(&names[..100]).is_err());
        assert_eq!(s.manifest().lines().count(), 4 + 315);
    }

    #[test]
    fn subset_sizes() {
        let s = FeatureSchema::new(3);
        let sizes: Vec<_> = DescriptorSubset::ALL.iter().map(|&d| s.subset_indices(d).len()).collect();
        assert_eq!(sizes, vec![315, 126, 54, 117, 18]);
    }

    #[test]
    fn tio_shape_and_determinism() {
        let img = noise(40, 36, 1);
        let cfg = ExtractionConfig::default();
        let a = extract_tio(&img, &cfg, "x").unwrap();
        assert_eq!(a.len(), 315);
        assert!(a.values.iter().all(|v| v.is_finite()));
        let b = extract_tio(&img, &cfg, "x").unwrap();
        assert_eq!(a.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn constant_image_is_degenerate() {
        let img = RasterImage::from_fn_rgb(16, 16, |_, _| [10, 120, 240]).unwrap();
        let cfg = ExtractionConfig::default();
        let v = extract_tio(&img, &cfg, "c").unwrap();
        let s = cfg.schema();
        for (e, &x) in s.entries().iter().zip(&v.values) {
            let name = e.family.value_names()[e.index];
            match (e.family, name) {
                (Family::Glcm, "contrast") | (Family::Info, _) | (Family::Bit, "shannon_wiener") => assert_eq!(x, 0.0, "{}", e.column_name()),
                _ => {}
            }
        }
        let degenerate = extract_block(&img, &cfg, Family::Bit, 0, Channel::R).unwrap();
        assert_eq!(degenerate.len(), 14);
        assert_eq!(degenerate[2], 1.0);
    }

    #[test]
    fn blocks_reassemble_tio() {
        let img = noise(24, 20, 7);
        let cfg = ExtractionConfig::default();
        let full = extract_tio(&img, &cfg, "n").unwrap();
        let mut joined = Vec::new();
        for family in Family::ALL {
            let part = extract_family(&img, &cfg, family).unwrap();
            assert_eq!(part.len(), cfg.schema().family_dims(family));
            joined.extend(part);
        }
        assert_eq!(joined, full.values);
    }

    #[test]
    fn rejects_small_and_bad_config() {
        let img = noise(7, 12, 2);
        assert!(matches!(extract_tio(&img, &ExtractionConfig::default(), "s"), Err(Error::ImageTooSmall { .. })));
        let img = noise(12, 12, 2);
        let cfg = ExtractionConfig {
            glcm_levels: 1,
            ..Default::default()
        };
        assert!(extract_tio(&img, &cfg, "s").is_err());
        let cfg = ExtractionConfig {
            schema_version: "tio-v0".into(),
            ..Default::default()
        };
        assert!(extract_tio(&img, &cfg, "s").is_err());
        assert!(extract_block(&img, &ExtractionConfig::default(), Family::Info, 0, Channel::R).is_err());
        assert!(extract_block(&img, &ExtractionConfig::default(), Family::Bit, 3, Channel::R).is_err());
    }

    #[test]
    fn rotation_by_180_is_invariant_on_odd_sizes() {
        // 33 -> 17 -> 9: every level has odd sides, so sampling commutes with the flip
        let img = noise(33, 33, 11);
        let flipped = {
            let mut data = Vec::with_capacity(img.data().len());
            for px in img.data().chunks_exact(3).rev() {
                data.extend_from_slice(px);
            }
            RasterImage::new(33, 33, 3, data).unwrap()
        };
        let cfg = ExtractionConfig::default();
        let a = extract_tio(&img, &cfg, "a").unwrap();
        let b = extract_tio(&flipped, &cfg, "b").unwrap();
        let s = cfg.schema();
        for fam in [Family::Bit, Family::Glcm, Family::Haralick, Family::Info] {
            for i in s.family_range(fam) {
                assert!((a.values[i] - b.values[i]).abs() < 1e-9, "{}", s.entries()[i].column_name());
            }
        }
    }

    #[test]
    fn smoothing_lowers_contrast_on_noise() {
        let cfg = ExtractionConfig::default();
        let s = cfg.schema();
        let contrast_at = |level| s.block_range(Family::Glcm, level, Channel::R).unwrap().start;
        let mut holds = 0;
        let trials = 30;
        for seed in 0..trials {
            let v = extract_tio(&noise(32, 32, 100 + seed), &cfg, "n").unwrap();
            if v.values[contrast_at(2)] <= v.values[contrast_at(0)] {
                holds += 1;
            }
        }
        assert!(holds as f64 >= 0.95 * trials as f64, "{holds}/{trials}");
    }
}
