use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("degenerate class counts: {0}")]
    DegenerateCounts(String),
    #[error("empty mask: {0}")]
    EmptyMask(&'static str),
    #[error("degenerate box: {0}")]
    DegenerateBox(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("component {0} not found")]
    ComponentNotFound(u32),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
