use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("side {0} is paired with itself")]
    FixedSide(usize),
    #[error("pairing is not involutive at side {0}")]
    NotInvolutive(usize),
    #[error("vertex {vertex} does not lie on side {side}")]
    VertexNotOnSide { side: usize, vertex: usize },
    #[error("correspondence for side {0} is not realised by an isometry: {1}")]
    NotAnIsometry(usize, String),
    #[error("isometry for side {0} reverses orientation")]
    OrientationReversing(usize),
    #[error("no integer solution")]
    NoSolution,
    #[error("relator {0} is not killed by the cover labels")]
    RelatorNotKilled(usize),
    #[error("labels generate a subgroup of order {image} in a group of order {order}")]
    Disconnected { image: usize, order: usize },
    #[error("generator {0} is not parabolic with unit scale")]
    NotParabolic(usize),
    #[error("unknown cusp id {0}")]
    UnknownCycle(usize),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
