use sumentropy_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Spec(String),

    #[error("{0}")]
    Cells(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("fit: {0}")]
    Fit(String),
}

impl AppError {
    /// Stable machine-readable error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            AppError::Usage(_) => "usage",
            AppError::Spec(_) => "spec",
            AppError::Cells(_) => "cells",
            AppError::Io { .. } => "io",
            AppError::Fit(_) => "fit",
            AppError::Core(e) => match e {
                CoreError::GcdUndefined => "gcd_undefined",
                CoreError::MalformedRational(_) => "malformed_rational",
                CoreError::DimensionMismatch { .. } => "dimension_mismatch",
                CoreError::EmptySupport => "empty_support",
                CoreError::DuplicateAtom(_) => "duplicate_atom",
                CoreError::DuplicateSymbol(_) => "duplicate_symbol",
                CoreError::InvalidProbability(_) => "invalid_probability",
                CoreError::SingletonVariance => "singleton_variance",
                CoreError::NotALattice => "not_a_lattice",
                CoreError::NullEvent => "null_event",
                CoreError::SupportOverflow { .. } => "support_overflow",
                CoreError::KeySpaceOverflow => "key_space_overflow",
                CoreError::InvalidCollection(_) => "invalid_collection",
                CoreError::Budget { .. } => "budget",
                CoreError::EnumerationBudget { .. } => "budget",
                CoreError::Precondition(_) => "precondition",
            },
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() })
    }
}

pub type AppResult<T> = Result<T, AppError>;
