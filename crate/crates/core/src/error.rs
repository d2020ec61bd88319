//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid box: x1 >= x0 and y1 >= y0 required, got ({x0}, {y0}, {x1}, {y1})")]
    InvalidBox { x0: f64, y0: f64, x1: f64, y1: f64 },

    #[error("quad vertices do not form a convex polygon: {0:?}")]
    NonConvexQuad([[f64; 2]; 4]),

    #[error("recall curve requires at least one target")]
    EmptyTargetSet,

    #[error("threshold grid must be ascending with at least two entries")]
    BadThresholdGrid,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: missing image dimensions for {image_id}")]
    MissingSize { path: PathBuf, image_id: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("top-score selection requested on an unscored proposal set ({method})")]
    UnscoredSelection { method: String },

    #[error("box parameter statistics need at least {needed} annotations, got {got}")]
    TooFewAnnotations { needed: usize, got: usize },

    #[error("trim fraction must lie in [0, 0.5), got {0}")]
    BadTrimFraction(f64),

    #[error("{param} = {value} outside the supported range [{lo}, {hi}]")]
    ParamOutOfRange {
        param: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("rotation projection requires the crop rectangle used when rendering")]
    MissingCrop,

    #[error("image id mismatch: reference '{reference}' vs perturbed '{perturbed}'")]
    ImageIdMismatch {
        reference: String,
        perturbed: String,
    },

    #[error("ground truth set contains no annotations")]
    EmptyGroundTruth,

    #[error("unknown class '{0}'")]
    UnknownClass(String),

    #[error("image decode failed for {path}: {message}")]
    Decode { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
