//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors produced by hypervector arithmetic, model fitting, and persistence.
#[derive(Debug, Error)]
pub enum HdcError {
    #[error("invalid dimension {0}: must be at least 2")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operand has form {found}, expected {expected}")]
    InvalidForm {
        expected: &'static str,
        found: &'static str,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("zero-norm operand in similarity")]
    ZeroNorm,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("name already present in space: {0}")]
    DuplicateName(String),

    #[error("unknown member: {0}")]
    UnknownMember(String),

    #[error("model is not fitted")]
    NotFitted,

    #[error("dataset has a single class; at least 2 distinct labels required")]
    SingleClass,

    #[error("stratification error: label {label} has {count} rows, fewer than {folds} folds")]
    Stratification {
        label: String,
        count: usize,
        folds: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown node: {0}")]
    UnknownNode(String),

    #[error("unknown weight class: {0}")]
    UnknownWeightClass(String),

    #[error("self-loop rejected: {0}")]
    SelfLoop(String),

    #[error("destructive cancellation: bundled state has vanishing norm")]
    DestructiveCancellation,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("bad model file: {0}")]
    BadModelFile(String),

    #[error("checksum mismatch: model file is corrupt or truncated")]
    ChecksumMismatch,

    #[error("unsupported model file version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },
}

pub type Result<T> = std::result::Result<T, HdcError>;
