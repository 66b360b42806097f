use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus must be at least 2 and fit a 32-bit vertex index, got {0}")]
    InvalidModulus(u64),
    #[error("coefficient {coeff} is not a residue modulo {modulus}")]
    CoefficientOutOfRange { coeff: u64, modulus: u64 },
    #[error("coefficients must be strictly increasing, got {0:?}")]
    CoefficientsNotIncreasing(Vec<u64>),
    #[error("a family needs at least one generator")]
    EmptyFamily,
    #[error("vertex {vertex} out of range for modulus {modulus}")]
    VertexOutOfRange { vertex: u64, modulus: u64 },
    #[error("generator index {index} out of range for {arity} generators")]
    GeneratorIndex { index: usize, arity: usize },
    #[error("operation requires {expected} generator(s), family has {found}")]
    UnsupportedArity { expected: usize, found: usize },
    #[error("unknown format `{0}`")]
    UnknownFormat(String),
    #[error("unknown invariant `{0}`")]
    UnknownInvariant(String),
    #[error("unknown lemma set `{0}`")]
    UnknownLemmaSet(String),
    #[error("unknown exception predicate `{0}`")]
    UnknownPredicate(String),
    #[error("graph document does not match its family: {0}")]
    InconsistentGraph(String),
    #[error("corrupt checkpoint {path}, line {line}: {reason}")]
    CorruptCheckpoint {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by bad input rather than the environment.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Csv(_) | Error::CorruptCheckpoint { .. })
    }
}
