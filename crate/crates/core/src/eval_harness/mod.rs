//! File formats and the commands behind the `ltp` binary.
//!
//! Every command reads its inputs fully, computes in memory (in parallel where
//! items are independent), then writes each output file once, atomically.
//! With the offline embedder and a scripted or table LLM, every output is a
//! pure function of the inputs and seed.

mod commands;
mod config;
mod files;
mod report;
mod scenario;

pub use commands::{
    cmd_evaluate, cmd_extract_metadata, cmd_fuse, cmd_lanewidths, cmd_report, cmd_train_toy, evaluate_scenarios,
    sidecar_path, EvaluateArgs, ExtractArgs, ExtractOutcome, FuseArgs, FuseOutcome, FuseVariant, LaneWidthArgs,
    LaneWidthOutcome, TrainToyArgs, DEFAULT_CHUNK_CHARS, DEFAULT_CHUNK_OVERLAP, DEFAULT_D_MAP, DEFAULT_PARALLELISM,
};
pub use config::{EmbedSpec, LlmSpec, RunConfig};
pub use files::{read_vector_file, write_atomic, write_vector_file};
pub use report::{read_reports, render_table, render_table_flagged};
pub use scenario::{EgoPose, Frame, ScenarioFile};

use std::path::PathBuf;

use crate::design_manual_rag::RagError;
use crate::osm_ingest::OsmError;
use crate::prior_fusion::FusionError;
use crate::text_embed::EmbedError;
use crate::topo_metrics::MetricError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Osm(#[from] OsmError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Rag(#[from] RagError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("schema error in {path}: {reason}")]
    Schema { path: PathBuf, reason: String },
    #[error("frame sets differ: {0}")]
    FrameMismatch(String),
    #[error("variant eq3 needs a lane-width file")]
    MissingLaneWidths,
    #[error("configuration: {0}")]
    Config(String),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }
}
