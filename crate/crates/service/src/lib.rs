//! Session service: HTTP protocol, display-command event stream and the
//! command-line tools around the dialogue pipeline.

pub mod app;
pub mod commands;
pub mod config;

use std::path::PathBuf;

pub use app::{router, AppState, PROTOCOL_VERSION};
pub use config::{Config, Loaded, CONFIG_ENV};

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("config: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error(transparent)]
    Solver(#[from] trains_core::solver::SolverError),
    #[error(transparent)]
    Model(#[from] trains_core::speechpp::ModelError),
    #[error(transparent)]
    Corpus(#[from] trains_core::corpus::CorpusError),
    #[error(transparent)]
    Discourse(#[from] trains_core::discourse::DiscourseError),
    #[error(transparent)]
    Generator(#[from] trains_core::generator::GeneratorError),
    #[error(transparent)]
    Session(#[from] trains_core::session::SessionError),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
}
