use thiserror::Error;

/// Every fallible operation in the crate reports through this type.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("empty region")]
    EmptyRegion,
    #[error("invalid interval [{lo}, {hi}]: need lo < hi")]
    BadInterval { lo: String, hi: String },
    #[error("point {x} outside domain {domain}")]
    Domain { x: String, domain: String },
    #[error("preimage undefined: component {component} not inside image {image}")]
    Preimage { component: String, image: String },
    #[error("composition error: sub-interval {gap} of the inner image is not in the outer domain")]
    Compose { gap: String },
    #[error("map not strictly increasing: {0}")]
    NotMonotone(String),
    #[error("fill length mismatch: target length {target}, shape length {shape}")]
    FillLength { target: String, shape: String },
    #[error("window length {window} is not a multiple of period {period}")]
    ProjectWindow { window: String, period: String },
    #[error("tails not commensurate: {0}")]
    TailsNotCommensurate(String),
    #[error("pair inadmissible for this omega, xi: {0}")]
    Inadmissible(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("verification failed at {stage}: {detail}")]
    Verification { stage: String, detail: String },
    #[error("size budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
