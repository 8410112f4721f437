use thiserror::Error;

use crate::phase::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Parse(String),

    #[error("invalid rational {0:?}")]
    BadRational(String),

    #[error("dimension mismatch: {modules} modules but S is {rows}x{cols}")]
    DimensionMismatch {
        modules: usize,
        rows: usize,
        cols: usize,
    },

    #[error("datum has no modules")]
    Empty,

    #[error("duplicate module label {0:?}")]
    DuplicateLabel(String),

    #[error("vacuum module must have weight 0, found {0}")]
    VacuumWeight(Rational),

    #[error("S-matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("k must be prime, got {0}")]
    NotPrime(i64),

    #[error("{name} = {value} is out of range {range}")]
    OutOfRange {
        name: &'static str,
        value: i64,
        range: String,
    },

    #[error("determinant of ({a}, {b}; {c}, {d}) is not 1")]
    NotUnimodular { a: i64, b: i64, c: i64, d: i64 },

    #[error("integer overflow in SL2(Z) arithmetic")]
    Overflow,

    #[error(
        "vacuum-row entry S[0][{index}] = {value:e} is too close to zero for the Verlinde formula"
    )]
    SingularVacuumRow { index: usize, value: f64 },

    #[error("missing block data for orbits ({i}, {j}): {reason}")]
    MissingBlock { i: usize, j: usize, reason: String },

    #[error("invalid group data: {0}")]
    GroupData(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
