use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({0}, {1}) lies outside the surface domain")]
    OutOfDomain(f64, f64),

    #[error("finite-difference stencil around {0:?} crosses the interface")]
    StencilCrossesInterface([f64; 3]),

    #[error("non-finite value encountered while evaluating {0}")]
    NonFinite(&'static str),

    #[error("total internal reflection: discriminant {discriminant:e} < 0")]
    TotalInternalReflection { discriminant: f64 },

    #[error("grazing incidence: |k_i . n| = {0:e}")]
    GrazingIncidence(f64),

    #[error("incident direction does not point into the upper region (k_i . n = {0})")]
    WrongSideIncidence(f64),

    #[error("no root of the refraction quadratic gives a forward transmitted direction")]
    NoForwardRoot,

    #[error("no root of the reflection quadratic gives a backward reflected direction")]
    NoBackwardRoot,

    #[error("target direction is not transmitted (k_r . n = {0})")]
    NonTransmittedTarget(f64),

    #[error("direction is not a unit vector (|k| = {0})")]
    NotUnit(f64),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("bad parameters for `{entry}`: {reason}")]
    BadParams { entry: String, reason: String },

    #[error("degenerate grid {0}x{1}: at least 2x2 nodes are required")]
    SingularSystem(usize, usize),

    #[error("least-squares solve failed: {0}")]
    Solver(String),

    #[error("test function support is not contained in the surface domain")]
    SupportOutsideDomain,

    #[error("quadrature did not converge: last two estimates differ by {0:e}")]
    QuadratureBudgetExceeded(f64),

    #[error("failed to parse config: {0}")]
    ConfigParse(String),

    #[error("unknown subcommand `{0}`")]
    UnknownSubcommand(String),

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn bad_params(entry: &str, reason: impl Into<String>) -> Self {
        Error::BadParams {
            entry: entry.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
