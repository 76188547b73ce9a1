use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("invalid grid spec: {0}")]
    InvalidSpec(String),

    #[error("grid mismatch: {0}")]
    SpecMismatch(&'static str),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("ill-conditioned band: s_nu = {s_nu:.3e} below floor {floor:.3e} at (m={m}, mu={mu}, k={k})")]
    IllConditioned {
        m: usize,
        mu: usize,
        k: usize,
        s_nu: f64,
        floor: f64,
    },

    #[error("file format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
