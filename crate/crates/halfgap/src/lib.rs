//! Parallel, checkpointed driver around `halfgap-core`.
//!
//! The pipeline walks every candidate pair of cycle covers for one node
//! count, keeps one representative per isomorphism class, classifies it as
//! infeasible, non-extreme or a vertex, and solves the gap LP for vertices.
//! Results are written as JSONL or CSV records or as a summary table.

pub mod checkpoint;
pub mod oracle;
pub mod pipeline;
pub mod records;
pub mod table;
pub mod verify;

pub use halfgap_core as core;
pub use pipeline::{run_pipeline, Format, PipelineConfig, Run, RunSummary, Stage, StageTimings};
pub use records::{parse_pair, read_records, write_records};
pub use table::{emit_table, summarize_records};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] halfgap_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("bad record: {0}")]
    Record(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
