use thiserror::Error;

use crate::graph::VertexId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    Validation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("vertices {0} and {1} map to the same tensor cell ({2}, {3})")]
    CellCollision(VertexId, VertexId, usize, usize),

    #[error("edge ({0}, {1}) cannot be encoded even after a midpoint split")]
    Unrepresentable(VertexId, VertexId),

    #[error("tensor dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("tensor format error: {0}")]
    Format(String),

    #[error("unknown sweep axis `{0}`")]
    UnknownAxis(String),

    #[error("sweep needs at least one value")]
    EmptySweep,

    #[error("infeasible synthetic spec: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
