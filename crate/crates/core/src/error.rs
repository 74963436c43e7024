use std::path::PathBuf;

use thiserror::Error;

use crate::field::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({}, {}) lies outside the domain", .0.x, .0.y)]
    OutsideDomain(Point),

    #[error("quotient denominator vanishes at ({}, {})", .0.x, .0.y)]
    Singularity(Point),

    #[error("grid resolution {nx}x{ny} is too coarse (need at least 3x3)")]
    Resolution { nx: usize, ny: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("fields live on different domains")]
    DomainMismatch,

    #[error("field vanishes near ({}, {}): min |value| = {value:e}", .at.x, .at.y)]
    Vanishing { at: Point, value: f64 },

    #[error("compatibility condition violated: max residual {residual:e} exceeds {tolerance:e}")]
    Compatibility { residual: f64, tolerance: f64 },

    #[error("{what} is not a solution: residual {residual:e} exceeds {tolerance:e}")]
    NotASolution {
        what: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("{what} is unbounded on the domain: max modulus {value:e}")]
    Unbounded { what: String, value: f64 },

    #[error("degenerate pair (Q{0}, Q{1}): difference vanishes on the sample set")]
    DegeneratePair(usize, usize),

    #[error("contour not closed")]
    ContourNotClosed,

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("config error on line {line}: {msg}")]
    ConfigSyntax { line: usize, msg: String },

    #[error("invalid config field `{field}`: {msg}")]
    ConfigField { field: String, msg: String },

    #[error("malformed grid file {path}: {msg}")]
    GridFormat { path: PathBuf, msg: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
