//! File formats, the built-in catalog, seeded sampling and the command-line driver for
//! `ttstar-core`.

pub mod catalog;
pub mod commands;
pub mod report;
pub mod sampling;
pub mod specfile;

pub use commands::{run, Cli, Outcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] ttstar_core::Error),
    #[error("io error: {0}")]
    Io(String),
    #[error("unknown catalog name {0:?}")]
    UnknownName(String),
    #[error("{0}")]
    Usage(String),
}
