use serde::Serialize;
use thiserror::Error;

/// A single failed constraint found while validating an object.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Machine-readable constraint code, e.g. `"unit_effect"` or `"equal_norm"`.
    pub constraint: String,
    /// Index of the offending element, when the constraint is per-element.
    pub index: Option<usize>,
    /// How far the constraint is from being satisfied.
    pub residual: f64,
}

impl Violation {
    pub fn new(constraint: impl Into<String>, index: Option<usize>, residual: f64) -> Self {
        Self {
            constraint: constraint.into(),
            index,
            residual,
        }
    }
}

#[derive(Debug, Error)]
pub enum GptError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate in vector")]
    NonFinite,

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid polygon order {0}: need 3 <= n <= n_max")]
    InvalidOrder(usize),

    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),

    #[error("theory mismatch: {0}")]
    TheoryMismatch(String),

    #[error("operation not supported for this theory: {0}")]
    Unsupported(String),

    #[error("invalid {what}: {} violation(s)", violations.len())]
    Invalid {
        what: &'static str,
        violations: Vec<Violation>,
    },

    #[error("probability {0} outside [0, 1] beyond tolerance")]
    ProbabilityOutOfRange(f64),

    #[error("gamma {0} outside (0, 2]")]
    GammaOutOfRange(f64),

    #[error("guessing function is not total: {0}")]
    NotTotal(String),

    #[error("no feasible candidate found")]
    NoFeasibleCandidate,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GptError {
    pub(crate) fn invalid(what: &'static str, violations: Vec<Violation>) -> Self {
        GptError::Invalid { what, violations }
    }

    /// Violations carried by an `Invalid` error, empty otherwise.
    pub fn violations(&self) -> &[Violation] {
        match self {
            GptError::Invalid { violations, .. } => violations,
            _ => &[],
        }
    }
}

pub type Result<T> = std::result::Result<T, GptError>;
