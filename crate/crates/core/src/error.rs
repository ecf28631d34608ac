use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to decode image: {0}")]
    Decode(String),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("expected {expected} channels, got {actual}")]
    ChannelCount { expected: usize, actual: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid image geometry: {0}")]
    InvalidImage(String),

    #[error("invalid gray level count {0} (must be within 2..=256)")]
    InvalidLevelCount(usize),

    #[error("image of {width}x{height} is too small: {reason}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        reason: String,
    },

    #[error("invalid expand target {target_w}x{target_h} for a {width}x{height} input")]
    InvalidTargetSize {
        width: usize,
        height: usize,
        target_w: usize,
        target_h: usize,
    },

    #[error("co-occurrence offset ({dx}, {dy}) is out of range")]
    OffsetOutOfRange { dx: i32, dy: i32 },

    #[error("no pixel pairs for offset ({dx}, {dy}) on a {width}x{height} image")]
    EmptyPairSet {
        dx: i32,
        dy: i32,
        width: usize,
        height: usize,
    },

    #[error("gray value {value} exceeds the {levels}-level range")]
    GrayValueOutOfRange { value: u8, levels: usize },

    #[error("co-occurrence matrix is not normalized")]
    NotNormalized,

    #[error("image is empty")]
    EmptyImage,

    #[error("abundance vector needs at least 2 individuals, got {0}")]
    DegenerateAbundance(u64),

    #[error("extraction failed for {source_id} at {level}/{channel}: {cause}")]
    Extraction {
        source_id: String,
        level: String,
        channel: String,
        #[source]
        cause: Box<Error>,
    },

    #[error("corpus at {0} contains no images")]
    EmptyCorpus(PathBuf),

    #[error("cannot read directory {path}: {cause}")]
    UnreadableDirectory {
        path: PathBuf,
        #[source]
        cause: std::io::Error,
    },

    #[error("class {label:?} has {count} item(s); at least {required} required")]
    ClassTooSmall {
        label: String,
        count: usize,
        required: usize,
    },

    #[error("invalid split ratio {0} (must be strictly between 0 and 1)")]
    InvalidRatio(f64),

    #[error("empty set: {0}")]
    EmptySet(&'static str),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("covariance matrix is singular")]
    SingularCovariance,

    #[error("degenerate class configuration: {0}")]
    DegenerateClass(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
