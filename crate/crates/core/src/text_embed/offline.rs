use super::{EmbedBackend, EmbedError, EmbeddingVector};

/// Advertised dimension of the hosted embedding model this backend stands in for.
pub const DEFAULT_DIMENSION: usize = 1536;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a over the UTF-8 bytes of `s`.
pub fn fnv1a64(s: &str) -> u64 {
    s.bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// Lowercases, then splits on every non-alphanumeric character.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Signed feature hashing: token hash `h` adds `±1` to bucket `h mod D`, the
/// sign taken from bit 63 (set means negative). The result is L2-normalized;
/// text without tokens maps to the zero vector.
#[derive(Debug, Clone)]
pub struct OfflineEmbedder {
    dimension: usize,
    model_id: String,
}

impl OfflineEmbedder {
    pub fn new(dimension: usize) -> Result<Self, EmbedError> {
        if dimension == 0 {
            return Err(EmbedError::Config("embedding dimension must be positive".into()));
        }
        Ok(Self {
            dimension,
            model_id: format!("offline-fnv1a-{dimension}"),
        })
    }
}

impl Default for OfflineEmbedder {
    fn default() -> Self {
        Self::new(DEFAULT_DIMENSION).expect("default dimension is positive")
    }
}

impl EmbedBackend for OfflineEmbedder {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn model_id(&self) -> &str {
        &self.model_id
    }

    fn embed(&self, text: &str) -> Result<EmbeddingVector, EmbedError> {
        let mut values = vec![0.0f64; self.dimension];
        for token in tokenize(text) {
            let h = fnv1a64(&token);
            let bucket = (h % self.dimension as u64) as usize;
            let sign = if h >> 63 == 1 { -1.0 } else { 1.0 };
            values[bucket] += sign;
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            values.iter_mut().for_each(|v| *v /= norm);
        }
        EmbeddingVector::new(values)
    }
}
