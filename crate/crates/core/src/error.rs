//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("sdf error: {0}")]
    Sdf(String),

    #[error("gripper spec error: {0}")]
    GripperSpec(String),

    #[error("grasp error: {0}")]
    Grasp(String),

    #[error("qp error: {0}")]
    Qp(String),

    #[error("optimizer error: {0}")]
    Optimizer(String),

    #[error("metrics error: {0}")]
    Metrics(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("dataset error: {0}")]
    Dataset(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
