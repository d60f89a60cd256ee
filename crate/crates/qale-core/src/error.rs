//! Error types shared across the toolkit.

use thiserror::Error;

/// Everything that can go wrong between parsing a group file and emitting a
/// report. Variants mirror the failure modes of the individual pipeline
/// stages so callers (and the CLI exit-code mapping) can tell configuration
/// problems, hypothesis failures and internal bugs apart.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum QaleError {
    #[error("division by zero in Q(zeta_{order})")]
    DivisionByZero { order: usize },

    #[error("cyclotomic order {0} exceeds the supported maximum {max}", max = crate::exact::MAX_CYCLOTOMIC_ORDER)]
    OrderTooLarge(usize),

    #[error("matrix dimension {rows}x{cols} exceeds the supported maximum {max}x{max}", max = crate::exact::MAX_MATRIX_DIM)]
    MatrixTooLarge { rows: usize, cols: usize },

    #[error("generator {index} is not unitary")]
    NotUnitary { index: usize },

    #[error("generator {index} does not have determinant 1")]
    NotSpecialDeterminant { index: usize },

    #[error("group closure exceeded the cap of {max_order} elements")]
    OrderExceeded { max_order: usize },

    #[error("the given element set is not a subgroup: {reason}")]
    NotASubgroup { reason: String },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("stratum hypothesis violated: A does not act freely off its fixed space")]
    FreeActionViolated,

    #[error("the stratification is not isolated (length {length} > 2)")]
    NotIsolated { length: usize },

    #[error("operation requires ambient dimension {expected}, group has {actual}")]
    WrongDimension { expected: usize, actual: usize },

    #[error("group is not known to lie in a symplectic group (status {status})")]
    NotSymplectic { status: String },

    #[error("rank {rank} exceeds min(h_c, h) = {bound}")]
    RankBound { rank: u64, bound: u64 },

    #[error("weight exponent a = {a} is inconclusive for |a| <= n = {n}")]
    InconclusiveWeight { a: String, n: usize },

    #[error("not a chain complex: d o d != 0 at degree {degree}")]
    NotAComplex { degree: usize },

    #[error("ladder hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("quadrature mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, QaleError>;
