//! Lane-width priors from a road design manual via retrieval-augmented prompting.
//!
//! Pipeline per road: [`retrieve`] the manual chunks closest to the road's
//! metadata, [`build_prompt`], ask an [`LlmClient`], then
//! [`parse_width_response`] into a [`LaneWidthAnswer`].

mod chunk;
mod llm;
mod prompt;
mod query;
mod store;

pub use chunk::{chunk_manual, TextChunk};
pub use llm::{
    LaneWidthRequest, LlmClient, RemoteLlmClient, RemoteLlmConfig, ScriptedLlmClient, TableLlmClient, LLM_API_KEY_ENV,
};
pub use prompt::{build_prompt, format_width, parse_width_response, retrieval_query};
pub use query::{
    lane_width_text, query_lane_width, read_answers_file, write_answers_file, LaneWidthAnswer, MAX_WIDTH_M, MIN_WIDTH_M,
};
pub use store::{build_store, retrieve, ManualChunk, VectorStore};

use crate::text_embed::EmbedError;

/// Default number of retrieved chunks per query.
pub const DEFAULT_TOP_K: usize = 4;

#[derive(Debug, thiserror::Error)]
pub enum RagError {
    #[error("invalid chunking: chunk_chars={chunk_chars}, overlap_chars={overlap_chars}")]
    InvalidChunking { chunk_chars: usize, overlap_chars: usize },
    #[error("vector store is empty")]
    EmptyStore,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("no lane width found in response {0:?}")]
    WidthNotFound(String),
    #[error("lane width {0} m outside the accepted band [2, 6] m")]
    WidthOutOfRange(f64),
    #[error("LLM service unavailable: {0}")]
    ServiceUnavailable(String),
    #[error("no scripted response for way {0}")]
    NoScriptedResponse(i64),
    #[error("invalid {what} file: {reason}")]
    Format { what: &'static str, reason: String },
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl RagError {
    /// Whether a failure for one road should stop the whole run.
    pub fn is_fatal(&self) -> bool {
        matches!(
            self,
            RagError::ServiceUnavailable(_) | RagError::Embed(_) | RagError::Io(_) | RagError::EmptyStore
        )
    }
}
