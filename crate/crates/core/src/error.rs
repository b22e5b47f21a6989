use std::path::PathBuf;

use crate::geometry::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape has no interior")]
    EmptyShape,

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    /// The largest inscribed circle is smaller than the search resolution.
    /// `fallback` is the shape centroid clamped to the interior.
    #[error("degenerate shape: inscribed radius {radius} is below grid step {grid_step}")]
    DegenerateShape {
        fallback: Point,
        radius: f64,
        grid_step: f64,
    },

    #[error("center ({}, {}) lies outside the shape", .0.x, .0.y)]
    CenterOutsideShape(Point),

    #[error("invalid contour resolution N = {0} (need N >= 3)")]
    InvalidN(usize),

    #[error("invalid descriptor dimension M = {m}: {reason}")]
    InvalidM { m: usize, reason: String },

    #[error("contour matrix has no columns")]
    EmptyMatrix,

    #[error("invalid contour matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("least-squares system is numerically singular ({0})")]
    IllConditioned(String),

    #[error("too few points: need {needed}, have {have}")]
    TooFewPoints { needed: usize, have: usize },

    #[error("contour has no boundary points")]
    EmptyContour,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error in {path}: line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("annotation {annotation} references unknown category id {category_id}")]
    UnknownCategoryId { annotation: u64, category_id: u64 },

    #[error("group '{0}' has no usable instances")]
    EmptyGroup(String),

    #[error("no instances left after filtering ({0})")]
    NoInstances(String),

    #[error("{0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error was caused by user input (bad files, flags or data)
    /// rather than a failure inside the library.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::IllConditioned(_))
    }
}
