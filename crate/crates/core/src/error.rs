use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot encode an empty sequence")]
    EmptySequence,
    #[error("grid index {index} out of range for side {side}")]
    GridIndexOutOfRange { index: usize, side: usize },
    #[error("expected a positive rational, got {0}")]
    NonPositive(String),
    #[error("invalid rational literal {0:?}")]
    BadRational(String),
    #[error("dimension must be at least {min}, got {got}")]
    Dimension { min: usize, got: usize },
    #[error("point has {got} coordinates, space expects {expected}")]
    PointArity { expected: usize, got: usize },
    #[error("point is outside the space: {0}")]
    OutsideSpace(String),
    #[error("empty ball union")]
    EmptyUnion,
    #[error("space {space} does not declare {what}")]
    MissingHypothesis { space: String, what: &'static str },
    #[error("face axis {axis} out of range for dimension {n}")]
    FaceAxis { axis: usize, n: usize },
    #[error("unknown shape {0:?}")]
    UnknownShape(String),
    #[error("invalid shape parameters: {0}")]
    ShapeParams(String),
    #[error("invalid witness: {0}")]
    Witness(String),
    #[error("candidate construction failed: {0}")]
    Candidate(String),
    #[error("malformed document: {0}")]
    Format(String),
    #[error("complement program: {0}")]
    Program(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
