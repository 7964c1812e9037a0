use super::{check_dim, mlp_forward, FusionError, FusionParams, MlpParams, PolylineEmbedding};
use crate::text_embed::EmbeddingVector;

/// `G(p) + MLP(t)`.
pub fn fuse_additive(
    graph: &PolylineEmbedding,
    text: &EmbeddingVector,
    params: &MlpParams,
) -> Result<Vec<f64>, FusionError> {
    let m = mlp_forward(params, text)?;
    check_dim("map embedding", m.len(), graph.dim())?;
    Ok(graph.values().iter().zip(&m).map(|(g, m)| g + m).collect())
}

/// `G(p) + λ·MLP(t)`.
pub fn fuse_weighted(
    graph: &PolylineEmbedding,
    text: &EmbeddingVector,
    params: &FusionParams,
) -> Result<Vec<f64>, FusionError> {
    let m = mlp_forward(&params.mlp, text)?;
    check_dim("map embedding", m.len(), graph.dim())?;
    let lambda = params.lambda;
    Ok(graph.values().iter().zip(&m).map(|(g, m)| g + lambda * m).collect())
}

/// Metadata embedding plus lane-width embedding.
pub fn combine_text(metadata: &EmbeddingVector, lane_width: &EmbeddingVector) -> Result<EmbeddingVector, FusionError> {
    check_dim("lane-width embedding", metadata.dim(), lane_width.dim())?;
    Ok(metadata + lane_width)
}
