//! Fusion of text priors with polyline embeddings.
//!
//! A two-layer tanh MLP maps a text embedding `t` into the map-embedding space;
//! the fused road embedding is `G(p) + MLP(t)` ([`fuse_additive`]) or
//! `G(p) + λ·MLP(t)` with learnable `λ` ([`fuse_weighted`]). The text embedding
//! itself may be the metadata embedding alone or its sum with the lane-width
//! embedding ([`combine_text`]).

mod fuse;
mod grad;
mod mlp;
mod params_io;
mod polyline;
mod train;

pub use fuse::{combine_text, fuse_additive, fuse_weighted};
pub use grad::{fusion_gradients, squared_error, FusionGradients};
pub use mlp::{mlp_forward, FusionParams, MlpParams};
pub use params_io::{read_params, write_loss_csv, write_params, PARAMS_MAGIC};
pub use polyline::{graph_embed_polyline, project_to_local, PolylineEmbedding};
pub use train::{dataset_loss, train_fusion_toy, Sample, TrainConfig, TrainOutcome, Trainable};

#[derive(Debug, thiserror::Error)]
pub enum FusionError {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("polyline needs at least 2 distinct points, got {0}")]
    DegeneratePolyline(usize),
    #[error("map embedding dimension must be even and positive, got {0}")]
    InvalidMapDimension(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid parameter file: {0}")]
    ParamsFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_dim(context: &'static str, expected: usize, actual: usize) -> Result<(), FusionError> {
    if expected != actual {
        return Err(FusionError::DimensionMismatch {
            context,
            expected,
            actual,
        });
    }
    Ok(())
}
