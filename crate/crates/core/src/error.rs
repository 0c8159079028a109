use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("entry ({i}, {j}) is outside a {n}x{n} matrix")]
    IndexOutOfRange { i: usize, j: usize, n: usize },

    #[error("entry ({i}, {j}) is given more than once")]
    DuplicateEntry { i: usize, j: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    /// The shifted Gram matrix is numerically singular, which means the
    /// constraint matrices are linearly dependent.
    #[error(
        "Gram matrix factorization failed at constraint {row}: constraints are linearly dependent"
    )]
    FactorizationFailed { row: usize },

    #[error("symmetric eigendecomposition did not converge")]
    EigFailed,

    #[error("DIMACS input has no `p` header line")]
    MissingHeader,

    #[error("line {line}: vertex {vertex} is outside 1..={n}")]
    VertexOutOfRange {
        line: usize,
        vertex: usize,
        n: usize,
    },

    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },

    #[error("requested {requested} cuts but only {available} distinct triples exist")]
    CountExceedsPopulation { requested: usize, available: usize },

    #[error("could not draw linearly independent constraints after {attempts} attempts")]
    RankDeficient { attempts: usize },

    #[error("external LP solver: {0}")]
    ExternalSolver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
