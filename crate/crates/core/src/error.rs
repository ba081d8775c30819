use thiserror::Error;

/// Errors raised while loading data, fitting models or computing decompositions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("column `{0}` is not present in the data")]
    MissingColumn(String),

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("group column `{column}` must contain only 0 and 1 (row {row}: {value})")]
    NonBinaryGroup {
        column: String,
        row: usize,
        value: String,
    },

    #[error("input file has no header row")]
    EmptyFile,

    #[error("csv error: {0}")]
    Csv(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("column `{column}` has {rows} rows, expected {expected}")]
    LengthMismatch {
        column: String,
        rows: usize,
        expected: usize,
    },

    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),

    #[error("column `{column}` has missing values at analysis rows")]
    MissingValues { column: String },

    #[error("column `{0}` has zero variance")]
    ZeroVariance(String),

    #[error("principal components need at least two columns")]
    TooFewColumns,

    #[error("design matrix is rank deficient; dependent columns: {}", columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    #[error("design has {rows} rows but {cols} columns")]
    TooFewRows { rows: usize, cols: usize },

    #[error("logistic fit diverged: data are (quasi-)separated")]
    Separation,

    #[error("logistic fit did not converge in {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("binary outcome `{0}` must contain both 0 and 1 and nothing else")]
    NonBinaryOutcome(String),

    #[error("denominator {which} = {value:e} is too close to zero")]
    NearZeroDenominator { which: String, value: f64 },

    #[error("empty stratum: no observations in cell {cell}")]
    EmptyStratum { cell: String },

    #[error("column `{column}` has {levels} distinct levels (limit {limit})")]
    TooManyLevels {
        column: String,
        levels: usize,
        limit: usize,
    },

    #[error("group R={0} has no analysis rows")]
    EmptyGroup(u8),

    #[error("invalid analysis: {0}")]
    InvalidSpec(String),

    #[error("Oaxaca-Blinder decompositions are not valid with a time-dependent confounder")]
    TimeDependentConfounding,

    #[error("initial disparity is degenerate ({0:e}); proportion reduced is undefined")]
    DegenerateInitial(f64),

    #[error("bootstrap needs at least 2 replicates, got {0}")]
    InvalidReplicates(usize),

    #[error("{failed} of {total} bootstrap replicates failed")]
    TooManyFailures { failed: usize, total: usize },

    #[error("closed-form truth is unavailable for {0}")]
    UnsupportedMode(String),

    #[error("invalid structural parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
