use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("transition matrix is not square: {rows} rows but row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },

    #[error("transition matrix has size {matrix} but the alphabet has {alphabet} symbols")]
    SizeMismatch { alphabet: usize, matrix: usize },

    #[error("transition matrix entry ({row}, {col}) is {value}; only 0 and 1 are allowed")]
    NotBinary { row: usize, col: usize, value: u8 },

    #[error("symbol {symbol} has no {direction}")]
    ZeroRowOrColumn { symbol: usize, direction: &'static str },

    #[error("the alphabet must contain at least one symbol")]
    EmptyAlphabet,

    #[error("the subshift is not mixing (transition matrix is not primitive)")]
    NotPrimitive,

    #[error("word {0} is not admissible")]
    WordNotAdmissible(String),

    #[error("invalid word {0:?}")]
    InvalidWord(String),

    #[error("periodic orbit {0} is not admissible")]
    OrbitNotAdmissible(String),

    #[error("periodic orbit {0} is not primitive (it is a power of a shorter word)")]
    OrbitNotPrimitive(String),

    #[error("orbits {0} and {1} share a point")]
    OrbitsIntersect(String, String),

    #[error("depth {depth} cannot separate orbits {a} and {b}; some {depth}-word is a prefix of both")]
    InsufficientDepth { depth: usize, a: String, b: String },

    #[error("depth must be at least 1")]
    ZeroDepth,

    #[error("potential table: {0}")]
    InvalidTable(String),

    #[error("objects live on different subshifts")]
    SftMismatch,

    #[error("{0} is too large to enumerate")]
    TooLarge(String),

    #[error("period {0} exceeds the enumeration limit of 16")]
    PeriodTooLarge(usize),

    #[error("grid: {0}")]
    InvalidGrid(String),

    #[error("function is not convex (second difference {second_difference:e} at index {index})")]
    NotConvex { index: usize, second_difference: f64 },

    #[error("function is not concave (second difference {second_difference:e} at index {index})")]
    NotConcave { index: usize, second_difference: f64 },

    #[error("maximum {found} differs from the prescribed value {expected} by more than {tol:e}")]
    MaxMismatch { expected: f64, found: f64, tol: f64 },

    #[error("maximizer is not unique: flat top spans indices {first}..={last}")]
    NonUniqueMaximizer { first: usize, last: usize },

    #[error("negative value {value:e} at index {index}")]
    NegativeValues { index: usize, value: f64 },

    #[error("boundary slopes have not stabilized: variation {variation:e} on the {side} side exceeds {tol:e}")]
    SlopesNotStabilized { side: &'static str, variation: f64, tol: f64 },

    #[error("graph has no points")]
    EmptyGraph,

    #[error("hypothesis violated: {hypothesis} (measured {measured:e}, tolerance {tol:e})")]
    HypothesisViolation { hypothesis: String, measured: f64, tol: f64 },

    #[error("maximum of the target spectrum {found} differs from the topological entropy {expected}")]
    MaxEntropyMismatch { expected: f64, found: f64 },

    #[error("numerical invariant violated: {0}")]
    Numerical(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("io: {0}")]
    Io(String),

    #[error("config: {0}")]
    ConfigInvalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
