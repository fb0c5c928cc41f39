use std::path::PathBuf;

/// Errors produced by mesh loading, geometric analysis and dataset generation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path} at line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("mesh is degenerate: {0}")]
    DegenerateMesh(String),
    #[error("mesh is not watertight ({boundary_edges} boundary edges)")]
    NotWatertight { boundary_edges: usize },
    #[error("convex hull failed: {0}")]
    HullFailed(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("QP solver did not converge after {iterations} iterations")]
    QpNonConvergence { iterations: usize },
    #[error("empty candidate set: {0}")]
    EmptyCandidates(String),
    #[error("camera: {0}")]
    Camera(String),
    #[error("dataset: {0}")]
    Dataset(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
