use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::{RagError, TextChunk};
use crate::text_embed::{cosine_similarity, embed_text, EmbedBackend, EmbeddingVector};

#[derive(Debug, Clone, PartialEq)]
pub struct ManualChunk {
    pub chunk_id: usize,
    pub text: String,
    pub span: (usize, usize),
    pub embedding: EmbeddingVector,
}

/// In-memory index of embedded manual chunks. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorStore {
    chunks: Vec<ManualChunk>,
    dimension: usize,
}

impl VectorStore {
    pub fn chunks(&self) -> &[ManualChunk] {
        &self.chunks
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }

    pub fn get(&self, chunk_id: usize) -> Option<&ManualChunk> {
        self.chunks.get(chunk_id)
    }
}

/// Embeds every chunk (in parallel on the current rayon pool) and renumbers
/// ids densely from 0 in input order.
pub fn build_store(chunks: Vec<TextChunk>, backend: &dyn EmbedBackend) -> Result<VectorStore, RagError> {
    let embeddings: Vec<EmbeddingVector> = chunks
        .par_iter()
        .map(|c| embed_text(backend, &c.text))
        .collect::<Result<_, _>>()?;
    let chunks = chunks
        .into_iter()
        .zip(embeddings)
        .enumerate()
        .map(|(i, (c, embedding))| ManualChunk {
            chunk_id: i,
            text: c.text,
            span: c.span,
            embedding,
        })
        .collect();
    Ok(VectorStore {
        chunks,
        dimension: backend.dimension(),
    })
}

#[derive(PartialEq)]
struct Scored {
    score: f64,
    chunk_id: usize,
}

impl Eq for Scored {}

impl Ord for Scored {
    /// "Greater" means ranked earlier: higher score, then lower id.
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.chunk_id.cmp(&self.chunk_id))
    }
}

impl PartialOrd for Scored {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Top-`k` chunks by cosine similarity to the embedded query, best first; equal
/// scores rank by ascending chunk id.
pub fn retrieve(
    store: &VectorStore,
    query: &str,
    k: usize,
    backend: &dyn EmbedBackend,
) -> Result<Vec<(usize, f64)>, RagError> {
    if k == 0 {
        return Err(RagError::InvalidK);
    }
    if store.is_empty() {
        return Err(RagError::EmptyStore);
    }
    let q = embed_text(backend, query)?;
    // Min-heap of the best k seen so far (worst on top).
    let mut heap: BinaryHeap<std::cmp::Reverse<Scored>> = BinaryHeap::with_capacity(k + 1);
    for chunk in &store.chunks {
        let score = cosine_similarity(&q, &chunk.embedding)?;
        heap.push(std::cmp::Reverse(Scored {
            score,
            chunk_id: chunk.chunk_id,
        }));
        if heap.len() > k {
            heap.pop();
        }
    }
    let mut ranked: Vec<Scored> = heap.into_iter().map(|r| r.0).collect();
    ranked.sort_by(|a, b| b.cmp(a));
    Ok(ranked.into_iter().map(|s| (s.chunk_id, s.score)).collect())
}
