use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no discrete path at scale {delta} between {source_id} and {sink_id}")]
    NoDiscretePath {
        delta: f64,
        source_id: usize,
        sink_id: usize,
    },

    #[error("no pencil at this scale (flow value is zero)")]
    NoPencil,

    #[error("degenerate path: {0}")]
    DegeneratePath(String),

    #[error("pole error: evaluation point coincides with the pole")]
    Pole,

    #[error("quadrature did not converge with {nodes} nodes (last change {change:e})")]
    Quadrature { nodes: usize, change: f64 },

    #[error("search budget of {budget} labels exhausted")]
    Budget { budget: usize },

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
