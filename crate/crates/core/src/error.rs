use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: geometry has dimension {expected}, point has {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate in point {0:?}")]
    NonFinite(Vec<f64>),

    #[error("point {0:?} is not part of the tabulated carrier")]
    UnknownPoint(Vec<f64>),

    #[error("unknown point id `{0}` in sigma table")]
    UnknownId(String),

    #[error("duplicate point: `{0}`")]
    DuplicatePoint(String),

    #[error("missing sigma entry for pair ({0}, {1})")]
    MissingPair(String, String),

    #[error("diagonal violation: sigma({id}, {id}) = {value}")]
    DiagonalViolation { id: String, value: f64 },

    #[error("symmetry violation: sigma({a}, {b}) = {ab} but sigma({b}, {a}) = {ba}")]
    SymmetryViolation {
        a: String,
        b: String,
        ab: f64,
        ba: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("undefined direction class: {0}")]
    UndefinedDirectionClass(String),

    #[error("degenerate projection: every (P0Pi.P0Q) vanishes")]
    DegenerateProjection,

    #[error("degenerate skeleton: Gram determinant {det:e} is zero within tolerance")]
    DegenerateSkeleton { det: f64 },

    #[error("parameter regime violated: {0}")]
    ParameterRegime(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{0}")]
    Format(String),
}
