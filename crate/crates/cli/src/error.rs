use std::path::PathBuf;

use qsplit_core::pipeline::ChunkError;
use qsplit_core::{GenError, PermuteError, PipelineError, QasmError, RouteError, SimError, TopologyError};
use thiserror::Error;

/// Process exit codes, one per error class.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const TOPOLOGY: i32 = 3;
    pub const ROUTE: i32 = 4;
    pub const IO: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}:{source}", path.display())]
    Parse { path: PathBuf, source: QasmError },
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Route(#[from] RouteError),
    #[error(transparent)]
    Permute(#[from] PermuteError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Generate(#[from] GenError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => exit::PARSE,
            CliError::Topology(_) => exit::TOPOLOGY,
            CliError::Route(e) => route_code(e),
            CliError::Permute(e) => permute_code(e),
            CliError::Io { .. } => exit::IO,
            CliError::Pipeline(e) => match e {
                PipelineError::Qasm { .. } => exit::PARSE,
                PipelineError::Io { .. } => exit::IO,
                PipelineError::Route(e) => route_code(e),
                PipelineError::Chunk { source, .. } => match source {
                    ChunkError::Route(e) => route_code(e),
                    ChunkError::Permute(e) => permute_code(e),
                },
                _ => exit::FAILURE,
            },
            CliError::Generate(_) | CliError::Simulation(_) | CliError::Invalid(_) => exit::FAILURE,
        }
    }
}

fn route_code(e: &RouteError) -> i32 {
    match e {
        RouteError::Topology(_) => exit::TOPOLOGY,
        _ => exit::ROUTE,
    }
}

fn permute_code(e: &PermuteError) -> i32 {
    match e {
        PermuteError::Topology(_) => exit::TOPOLOGY,
        _ => exit::ROUTE,
    }
}
