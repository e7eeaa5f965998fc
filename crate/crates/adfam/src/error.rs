use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("horizon mismatch: {left} vs {right}")]
    HorizonMismatch { left: usize, right: usize },

    #[error("element {element} outside horizon {horizon}")]
    OutOfRange { element: usize, horizon: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("duplicate seed {0:?}")]
    DuplicateSeed(String),

    #[error("member index {index} appears on both sides of a condition")]
    LabelOverlap { index: usize },

    #[error("condition sides overlap at ground element {element}")]
    Overlap { element: usize },

    #[error("conditions belong to different families")]
    CrossFamily,

    #[error("conditions are incompatible")]
    Incompatible,

    #[error("family lacks {expected} metadata")]
    MissingMetadata { expected: &'static str },

    #[error("refinement emptied members {members:?} above the intersection ceiling")]
    RefinementKilled { members: Vec<usize> },

    #[error("family is not almost disjoint: {0}")]
    NotAlmostDisjoint(String),

    #[error("undecided comparison {context}: interval [{lo}, {hi}]")]
    Undecided {
        context: String,
        lo: String,
        hi: String,
    },

    #[error("size {size} exceeds the exact-mode limit {limit}")]
    SizeLimit { size: usize, limit: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("finite-scale construction failed: {0}")]
    Construction(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
