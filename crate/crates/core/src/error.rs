use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("level mismatch: expected level {expected}, found {found}")]
    LevelMismatch { expected: u32, found: u32 },

    #[error("not a triangle of the lattice triangulation: {0}")]
    NotALatticeTriangle(String),

    #[error("depth {depth} exceeds the geometric resource limit of {limit}")]
    ResourceLimit { depth: u32, limit: u32 },

    #[error("type set did not stabilize within {0} iterations")]
    Diverged(usize),

    #[error("classification error: {0}")]
    Classification(String),

    #[error("type {0} has a child outside the stable set")]
    Closure(u16),

    #[error("matrix structure error: {0}")]
    Structure(String),

    #[error("matrix is not primitive: {0}")]
    NotPrimitive(String),

    #[error("power method did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
