use thiserror::Error;

use crate::lattice::Coord;

#[derive(Debug, Error)]
pub enum IsiError {
    #[error("interface reaches the top or bottom of the box (|z| >= H)")]
    Truncated,
    #[error("too many truncated samples: {flagged} of {total}")]
    TruncationRate { flagged: usize, total: usize },
    #[error("cell {0} is outside the box")]
    OutsideBox(Coord),
    #[error("box too large for exact enumeration ({0} cells, limit 24)")]
    TooLarge(usize),
    #[error("invalid interface: {0}")]
    InvalidInterface(String),
    #[error("inadmissible wall collection: {0}")]
    Inadmissible(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("bad snapshot: {0}")]
    Format(String),
    #[error("internal consistency failure: {0}")]
    Bug(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, IsiError>;
