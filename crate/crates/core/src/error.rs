use thiserror::Error;

/// Errors raised while building diagrams or integrating over their cells.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("points {first} and {second} are identical")]
    DuplicatePoint { first: usize, second: usize },

    #[error("need at least {required} points in dimension {dim}, got {found}")]
    TooFewPoints {
        dim: usize,
        required: usize,
        found: usize,
    },

    #[error("dimension must be at least {min}, got {found}")]
    DimensionTooSmall { min: usize, found: usize },

    #[error("dimension {found} exceeds the supported maximum of {max}")]
    DimensionTooLarge { max: usize, found: usize },

    #[error("non-finite coordinate in point {index}")]
    NonFinite { index: usize },

    #[error("generator lies in the search hyperplane")]
    ParallelGenerator,

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("bisection failed to bracket a vertex")]
    NoBracket,

    #[error("descent exhausted {attempts} consecutive escaping rays")]
    RetryExhausted { attempts: usize },

    #[error("ray from cell {cell} escaped to infinity in direction {direction:?}")]
    UnboundedRay { cell: usize, direction: Vec<f64> },

    #[error("cell {0} is unbounded")]
    UnboundedCell(usize),

    #[error("interface between cells {0} and {1} is unbounded")]
    UnboundedFace(usize, usize),

    #[error("no cached face for cells ({lower}, {upper}); process cells in ascending order")]
    MissingCache { lower: usize, upper: usize },

    #[error("area map for cell {cell} has no entry for neighbor {neighbor}")]
    MissingNeighbor { cell: usize, neighbor: usize },

    #[error("column {column} loaded before columns above it")]
    OrderViolation { column: usize },

    #[error("index {index} out of range for {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
