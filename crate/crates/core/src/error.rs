use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("scale mismatch: atom at scale {atom} cannot live on the grid of scale {grid}")]
    ScaleMismatch { atom: i32, grid: i32 },
    #[error("grid of scale {grid} does not cover the annulus of scale {scale}")]
    Coverage { grid: i32, scale: i32 },
    #[error("unknown coefficient index {0}")]
    UnknownIndex(String),
    #[error("curve quadrature under-resolved: {given} nodes given, at least {required} required")]
    UnderResolved { given: usize, required: usize },
    #[error("epsilon {0} outside (0, 1/64); pass the override flag to allow it")]
    EpsilonRange(f64),
    #[error("degenerate scene: {0}")]
    DegenerateScene(String),
    #[error("frame is not Parseval: max deviation {0:.3e}")]
    NotParseval(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("config parse error at line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
