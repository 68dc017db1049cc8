use alloc::string::String;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("gcd undefined")]
    GcdUndefined,

    #[error("malformed rational {0:?}")]
    MalformedRational(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty support")]
    EmptySupport,

    #[error("duplicate atom {0}")]
    DuplicateAtom(String),

    #[error("duplicate symbol {0:?}")]
    DuplicateSymbol(String),

    #[error("invalid probabilities: {0}")]
    InvalidProbability(String),

    #[error("variance/h² undefined for singletons")]
    SingletonVariance,

    #[error("support is not a lattice")]
    NotALattice,

    #[error("conditioning on null event")]
    NullEvent,

    #[error("support overflow at N={n_reached}: {size} atoms exceed the cap of {cap}")]
    SupportOverflow { n_reached: usize, size: usize, cap: usize },

    #[error("key space overflow: the sum's coordinate box does not fit in 128 bits")]
    KeySpaceOverflow,

    #[error("invalid collection: {0}")]
    InvalidCollection(String),

    #[error("search budget of {budget} states exceeded (best lower bound so far: {best_lower_bound})")]
    Budget { budget: u64, best_lower_bound: usize },

    #[error("enumeration budget of {budget} count vectors exceeded")]
    EnumerationBudget { budget: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = core::result::Result<T, Error>;
