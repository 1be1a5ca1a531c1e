//! Crate-wide error type with stable machine-readable codes.

use std::path::PathBuf;

use crate::dataset::Split;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the toolkit can report. Each variant carries a stable
/// code (see [`Error::code`]) so downstream tooling can match on failures
/// without parsing messages.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("no meta.json found under {0}")]
    MissingMeta(PathBuf),
    #[error("malformed meta.json: {0}")]
    MalformedMeta(String),
    #[error("video {0} has no annotation frames")]
    EmptyVideo(String),
    #[error("PNG decode failed: {0}")]
    Decode(String),
    #[error("unsupported PNG bit depth {found}, expected 8")]
    UnsupportedDepth { found: u8 },
    #[error("unsupported PNG color type {0}, expected grayscale or indexed")]
    UnsupportedColorType(String),
    #[error("unknown video {0}")]
    UnknownVideo(String),
    #[error("unknown object {object_id} in video {video_id}")]
    UnknownObject { video_id: String, object_id: u8 },
    #[error("mask dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("track lengths differ: {0} vs {1}")]
    TrackLengthMismatch(usize, usize),
    #[error("box sequences differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("object {video_id}/{object_id} is absent from every frame")]
    AllAbsentTrack { video_id: String, object_id: u8 },
    #[error("attribute {attribute} needs at least {needed} present frames, found {found}")]
    InsufficientPresence {
        attribute: &'static str,
        needed: usize,
        found: usize,
    },
    #[error("attribute sidecar schema violation: {0}")]
    SchemaViolation(String),
    #[error("unknown value {value:?} for attribute {attribute}")]
    UnknownEnumValue { attribute: String, value: String },
    #[error("object {video_id}/{object_id} was scored but has no attribute profile")]
    MissingProfile { video_id: String, object_id: u8 },
    #[error("no JPEG frame for video {0}")]
    MissingFrames(String),
    #[error("category {0:?} missing from the taxonomy mapping")]
    UnmappedCategory(String),
    #[error("superclass {0:?} is not one of the 13 dataset superclasses")]
    UnknownSuperclass(String),
    #[error("training split is empty")]
    EmptyTrainSet,
    #[error("subset sampling requires the train split, got {0}")]
    NotTrainSplit(Split),
    #[error("fraction {0} outside (0, 1]")]
    InvalidFraction(f64),
    #[error("stratified sampling requires a taxonomy mapping")]
    MissingTaxonomy,
    #[error("channel dim {0} not divisible by 16")]
    IndivisibleDim(usize),
    #[error("non-finite value in {0}")]
    NonFiniteValue(&'static str),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attach path context to an I/O error.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable code for this failure.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MissingMeta(_) => "MISSING_META",
            Error::MalformedMeta(_) => "MALFORMED_META",
            Error::EmptyVideo(_) => "EMPTY_VIDEO",
            Error::Decode(_) => "DECODE_ERROR",
            Error::UnsupportedDepth { .. } => "UNSUPPORTED_DEPTH",
            Error::UnsupportedColorType(_) => "UNSUPPORTED_COLOR_TYPE",
            Error::UnknownVideo(_) => "UNKNOWN_VIDEO",
            Error::UnknownObject { .. } => "UNKNOWN_OBJECT",
            Error::DimensionMismatch(..) => "DIMENSION_MISMATCH",
            Error::TrackLengthMismatch(..) => "TRACK_LENGTH_MISMATCH",
            Error::LengthMismatch(..) => "LENGTH_MISMATCH",
            Error::AllAbsentTrack { .. } => "ALL_ABSENT_TRACK",
            Error::InsufficientPresence { .. } => "INSUFFICIENT_PRESENCE",
            Error::SchemaViolation(_) => "SCHEMA_VIOLATION",
            Error::UnknownEnumValue { .. } => "UNKNOWN_ENUM_VALUE",
            Error::MissingProfile { .. } => "MISSING_PROFILE",
            Error::MissingFrames(_) => "MISSING_FRAMES",
            Error::UnmappedCategory(_) => "UNMAPPED_CATEGORY",
            Error::UnknownSuperclass(_) => "UNKNOWN_SUPERCLASS",
            Error::EmptyTrainSet => "EMPTY_TRAIN_SET",
            Error::NotTrainSplit(_) => "NOT_TRAIN_SPLIT",
            Error::InvalidFraction(_) => "INVALID_FRACTION",
            Error::MissingTaxonomy => "MISSING_TAXONOMY",
            Error::IndivisibleDim(_) => "INDIVISIBLE_DIM",
            Error::NonFiniteValue(_) => "NON_FINITE_VALUE",
            Error::ShapeMismatch(_) => "SHAPE_MISMATCH",
            Error::Io { .. } => "IO_ERROR",
            Error::Json(_) => "JSON_ERROR",
        }
    }
}
