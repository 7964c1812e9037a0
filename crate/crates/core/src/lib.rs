//! Language priors for online lane-topology prediction.
//!
//! The crate turns OpenStreetMap road metadata and road design manuals into
//! per-road text embeddings, fuses them with polyline embeddings, and scores
//! predicted lane topologies with detection/topology metrics.
//!
//! Module map:
//! - [`osm_ingest`]: OSM XML parsing and canonical metadata strings.
//! - [`text_embed`]: embedding backends (offline feature hashing, remote HTTP).
//! - [`design_manual_rag`]: manual chunking, retrieval and lane-width queries.
//! - [`prior_fusion`]: MLP projection, additive/weighted fusion, gradients, toy trainer.
//! - [`topo_metrics`]: Fréchet distance, AP, DET_l, DET_t, TOP_ll, TOP_lt, OLS.
//! - [`eval_harness`]: file formats and the commands behind the `ltp` CLI.

pub mod design_manual_rag;
pub mod eval_harness;
pub mod osm_ingest;
pub mod prior_fusion;
pub mod text_embed;
pub mod topo_metrics;

pub use design_manual_rag::{LaneWidthAnswer, ManualChunk, VectorStore};
pub use osm_ingest::{MetadataRecord, RoadSegment};
pub use prior_fusion::{FusionParams, MlpParams, PolylineEmbedding};
pub use text_embed::{EmbedBackend, EmbeddingVector, OfflineEmbedder};
pub use topo_metrics::{MetricReport, TopologySet};
