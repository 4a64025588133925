use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is singular (rank {rank} < dimension {dim})")]
    SingularMatrix { rank: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid axis {axis} for a lattice of dimension {dim}")]
    InvalidAxis { axis: usize, dim: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("degenerate tetrad at site {0}")]
    DegenerateTetrad(usize),
    #[error("functionals belong to different coordinate catalogs")]
    CatalogMismatch,
    #[error("Lagrangian is not first order: velocity of {0} appears quadratically")]
    NonFirstOrderLagrangian(String),
    #[error("inconsistent system: constraint combination reduces to the nonzero constant {0}")]
    InconsistentSystem(String),
    #[error("degrees-of-freedom count is not an integer: {0}")]
    NonIntegerDof(String),
    #[error("constraint set does not come from the {expected} theory")]
    TheoryMismatch { expected: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unsolvable linear system")]
    Unsolvable,
}

pub type Result<T> = std::result::Result<T, Error>;
