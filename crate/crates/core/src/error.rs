use thiserror::Error;

use crate::pointset::PointSet;
use crate::verdict::Witness;

#[derive(Debug, Error)]
pub enum Error {
    #[error("instance rejected: {rule}: {detail}")]
    Reject { rule: &'static str, detail: String },

    #[error("generator {generator} is not a permutation of the ground set: {detail}")]
    NotPermutation { generator: usize, detail: String },

    #[error("generator {generator} maps basis set {basis_set} to a non-open set")]
    NotHomeomorphism { generator: usize, basis_set: PointSet },

    #[error("not a development: {0}")]
    NotDevelopment(Witness),

    #[error("enumeration budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: usize },

    #[error("invalid tunnel system: {0}")]
    InvalidTunnels(Witness),

    #[error("hypothesis failed at {stage}: {witness}")]
    HypothesisFail { stage: &'static str, witness: Witness },

    #[error("gauge is not invariant: {0}")]
    NotInvariantGauge(Witness),

    #[error("group is not equiregular: {0}")]
    NotEquiregular(Witness),

    #[error("group is not nearly proper at {stage}: {witness}")]
    NotNearlyProper { stage: &'static str, witness: Witness },

    #[error("gauge family is not separating: {0}")]
    NotSeparating(Witness),

    #[error("bad exhaustion: {0}")]
    BadExhaustion(String),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("parse error at line {line}, field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },

    #[error("validation error in `{field}`: {source}")]
    Validation {
        field: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown command `{0}`")]
    UnknownCommand(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
