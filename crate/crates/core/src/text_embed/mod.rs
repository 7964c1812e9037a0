//! Text embedding backends.
//!
//! [`OfflineEmbedder`] is a deterministic feature-hashing bag of tokens used
//! for tests and offline runs. [`RemoteEmbedder`] talks to an OpenAI-style
//! `/embeddings` endpoint and caches every response on disk, keyed by model
//! and text, so runs can be replayed without network access.

mod cache;
pub(crate) mod http;
mod offline;
mod remote;

pub use cache::EmbeddingCache;
pub use offline::{fnv1a64, tokenize, OfflineEmbedder, DEFAULT_DIMENSION};
pub use remote::{RemoteEmbedder, RemoteEmbedderConfig, EMBED_API_KEY_ENV};

use std::ops::Add;

#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("embedding service unavailable after {attempts} attempt(s): {reason}")]
    ServiceUnavailable { attempts: u32, reason: String },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("embedding contains non-finite values")]
    NonFinite,
    #[error("embedding cache: {0}")]
    Cache(#[from] std::io::Error),
    #[error("{0}")]
    Config(String),
}

/// Fixed-dimension real vector used for every text and map embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self, EmbedError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(EmbedError::NonFinite);
        }
        Ok(Self(values))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    /// Elementwise sum; errors when dimensions differ.
    pub fn checked_add(&self, other: &Self) -> Result<Self, EmbedError> {
        if self.dim() != other.dim() {
            return Err(EmbedError::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }
}

impl Add for &EmbeddingVector {
    type Output = EmbeddingVector;

    /// Panics on dimension mismatch; use [`EmbeddingVector::checked_add`] otherwise.
    fn add(self, rhs: Self) -> EmbeddingVector {
        self.checked_add(rhs).expect("embedding dimensions differ")
    }
}

/// A string-to-vector embedder. Implementations must be deterministic for a
/// fixed configuration and safe to call from several threads.
pub trait EmbedBackend: Send + Sync {
    fn dimension(&self) -> usize;
    fn model_id(&self) -> &str;
    fn embed(&self, text: &str) -> Result<EmbeddingVector, EmbedError>;
}

/// Embeds `text` and enforces the backend's declared dimension.
pub fn embed_text(backend: &dyn EmbedBackend, text: &str) -> Result<EmbeddingVector, EmbedError> {
    let v = backend.embed(text)?;
    if v.dim() != backend.dimension() {
        return Err(EmbedError::DimensionMismatch {
            expected: backend.dimension(),
            actual: v.dim(),
        });
    }
    Ok(v)
}

/// Cosine of the angle between `a` and `b`; 0 when either is the zero vector.
pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64, EmbedError> {
    if a.dim() != b.dim() {
        return Err(EmbedError::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    let dot: f64 = a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}
