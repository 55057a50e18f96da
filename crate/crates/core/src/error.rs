use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{context}: length {got} does not match expected {expected}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("item index {index} out of range for {cols} columns")]
    ItemOutOfRange { index: usize, cols: usize },

    #[error("row index {index} out of range for {rows} rows")]
    RowOutOfRange { index: usize, rows: usize },

    #[error("invalid support set: {0}")]
    InvalidSupport(String),

    #[error("invalid parameter {name} = {value}: must satisfy {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },

    #[error(
        "disjunctness check refused: {cols} columns x subset size {k} exceeds the \
         guard ({max_cols} columns, subset size {max_k}); enumeration is \
         O(N * C(N,K) * M) and intended for desk-scale instances only"
    )]
    OracleGuard {
        cols: usize,
        k: usize,
        max_cols: usize,
        max_k: usize,
    },

    #[error("column {column}: {got} flips exceed the adversary budget {budget}")]
    FlipBudgetExceeded {
        column: usize,
        got: usize,
        budget: usize,
    },

    #[error("column {column}: flip at row {row} is outside the column support")]
    FlipOutsideSupport { column: usize, row: usize },

    #[error("design is infeasible: {0}")]
    InfeasibleDesign(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// What went wrong while parsing a matrix or support-set file.
#[derive(Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    MissingHeader,
    BadHeader(String),
    BadDimensions { rows: usize, cols: usize },
    LineLength { expected: usize, got: usize },
    BadCharacter(char),
    BadIndex(String),
    MissingRows { expected: usize, got: usize },
    TrailingContent,
    MissingTrailingNewline,
}

impl std::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::MissingHeader => write!(f, "missing \"M N\" header"),
            Self::BadHeader(s) => write!(f, "malformed header {s:?}, expected \"M N\""),
            Self::BadDimensions { rows, cols } => {
                write!(f, "dimensions {rows}x{cols} out of range, both must be >= 1")
            }
            Self::LineLength { expected, got } => {
                write!(f, "row has {got} characters, expected {expected}")
            }
            Self::BadCharacter(c) => write!(f, "unexpected character {c:?}, rows are 0/1 only"),
            Self::BadIndex(s) => write!(f, "malformed index {s:?}"),
            Self::MissingRows { expected, got } => {
                write!(f, "file ends after {got} of {expected} rows")
            }
            Self::TrailingContent => write!(f, "unexpected content after the last row"),
            Self::MissingTrailingNewline => write!(f, "missing trailing newline"),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
