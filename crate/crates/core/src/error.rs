use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors surfaced by the library.
///
/// Every variant maps onto a stable machine-readable code (see [`Error::code`])
/// and a CLI exit status (see [`Error::exit_code`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("field elements belong to different number fields")]
    DescriptorMismatch,

    #[error("invalid field descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("division by zero in the number field")]
    DivisionByZero,

    #[error("empty word")]
    EmptyWord,

    #[error("letter {letter} is outside the alphabet of size {size}")]
    LetterOutOfRange { letter: usize, size: usize },

    #[error("unknown letter {0:?}")]
    UnknownLetter(char),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid linear representation: {0}")]
    InvalidRepresentation(String),

    #[error("invalid Markov measure: {0}")]
    InvalidMarkov(String),

    #[error("matrix sum is reducible")]
    Reducible,

    #[error("expected a one-dimensional kernel, found dimension {0}")]
    KernelDimension(usize),

    #[error("eigenvector is not strictly positive")]
    NonPositiveEigenvector,

    #[error("carry-state closure exceeded the cap of {cap} states")]
    StateCapExceeded { cap: usize },

    #[error("the greedy expansion of 1 is not finite (Renyi expansion does not terminate)")]
    NotFiniteRenyi,

    #[error("greedy expansion does not terminate within {0} digits")]
    NonTerminatingExpansion(usize),

    #[error("word {0:?} is not a concatenation of words of the admissible block set")]
    NotParseable(String),

    #[error("uniform digit probabilities required")]
    NonUniform,

    #[error("f({n}) is not positive")]
    NonPositiveValue { n: u64 },

    #[error("no admissible cut point for k = {k} in [{from}, {horizon}]: {inequality}")]
    NoCutPoint {
        k: usize,
        from: u64,
        horizon: u64,
        inequality: String,
    },

    #[error("only {got} partial quotients available, {wanted} requested")]
    InsufficientBits { got: usize, wanted: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable identifier printed on stderr by the CLI and returned through the C ABI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DescriptorMismatch => "DESCRIPTOR_MISMATCH",
            Error::InvalidDescriptor(_) => "INVALID_DESCRIPTOR",
            Error::DivisionByZero => "DIVISION_BY_ZERO",
            Error::EmptyWord => "EMPTY_WORD",
            Error::LetterOutOfRange { .. } => "LETTER_OUT_OF_RANGE",
            Error::UnknownLetter(_) => "UNKNOWN_LETTER",
            Error::InvalidInput(_) => "INVALID_INPUT",
            Error::InvalidRepresentation(_) => "INVALID_REPRESENTATION",
            Error::InvalidMarkov(_) => "INVALID_MARKOV",
            Error::Reducible => "REDUCIBLE",
            Error::KernelDimension(_) => "KERNEL_DIMENSION",
            Error::NonPositiveEigenvector => "NON_POSITIVE_EIGENVECTOR",
            Error::StateCapExceeded { .. } => "STATE_CAP_EXCEEDED",
            Error::NotFiniteRenyi => "NOT_FINITE_RENYI",
            Error::NonTerminatingExpansion(_) => "NON_TERMINATING_EXPANSION",
            Error::NotParseable(_) => "NOT_PARSEABLE",
            Error::NonUniform => "NON_UNIFORM",
            Error::NonPositiveValue { .. } => "NON_POSITIVE_VALUE",
            Error::NoCutPoint { .. } => "NO_CUT_POINT",
            Error::InsufficientBits { .. } => "INSUFFICIENT_BITS",
            Error::Parse(_) => "PARSE",
            Error::Json(_) => "JSON",
            Error::Io(_) => "IO",
        }
    }

    /// 3 for domain errors, 4 for resource caps, 2 for malformed input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::StateCapExceeded { .. } | Error::NonTerminatingExpansion(_) => 4,
            Error::Parse(_) | Error::Json(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}
