use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("knowledge base is empty")]
    EmptyKnowledgeBase,

    #[error("reputation is undefined for a population of {0} actor(s)")]
    PopulationTooSmall(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("infeasible strategy profile: {0}")]
    InfeasibleProfile(String),

    #[error("failed to read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse config {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Configuration problems (as opposed to I/O failures).
    pub fn is_config(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
