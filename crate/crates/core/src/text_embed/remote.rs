use std::collections::HashMap;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::http::{self, HttpFailure, HttpSettings};
use super::{EmbedBackend, EmbedError, EmbeddingCache, EmbeddingVector};

pub const EMBED_API_KEY_ENV: &str = "LTP_EMBED_API_KEY";

#[derive(Debug, Clone)]
pub struct RemoteEmbedderConfig {
    /// Full URL of the embeddings endpoint.
    pub endpoint: String,
    pub model: String,
    pub dimension: usize,
    pub api_key: Option<String>,
    pub timeout: Duration,
    pub max_attempts: u32,
    pub backoff: Duration,
}

impl RemoteEmbedderConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>, dimension: usize) -> Self {
        let http = HttpSettings::default();
        Self {
            endpoint: endpoint.into(),
            model: model.into(),
            dimension,
            api_key: std::env::var(EMBED_API_KEY_ENV).ok(),
            timeout: http.timeout,
            max_attempts: http.max_attempts,
            backoff: http.backoff,
        }
    }
}

impl Default for RemoteEmbedderConfig {
    fn default() -> Self {
        Self::new(
            "https://api.openai.com/v1/embeddings",
            "text-embedding-3-small",
            super::DEFAULT_DIMENSION,
        )
    }
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    model: &'a str,
    input: &'a str,
}

#[derive(Deserialize)]
struct EmbedResponse {
    data: Vec<EmbedDatum>,
}

#[derive(Deserialize)]
struct EmbedDatum {
    embedding: Vec<f64>,
}

/// Client for an OpenAI-compatible embeddings endpoint.
///
/// Responses are quantized to `f32` and memoized per text; with a disk cache
/// attached they are also persisted, and cache hits never touch the network.
pub struct RemoteEmbedder {
    config: RemoteEmbedderConfig,
    http: HttpSettings,
    agent: ureq::Agent,
    cache: Option<EmbeddingCache>,
    memo: Mutex<HashMap<String, Vec<f32>>>,
}

impl RemoteEmbedder {
    pub fn new(config: RemoteEmbedderConfig, cache: Option<EmbeddingCache>) -> Result<Self, EmbedError> {
        if config.dimension == 0 {
            return Err(EmbedError::Config("embedding dimension must be positive".into()));
        }
        let http = HttpSettings {
            timeout: config.timeout,
            max_attempts: config.max_attempts,
            backoff: config.backoff,
        };
        Ok(Self {
            agent: http::agent(&http),
            http,
            config,
            cache,
            memo: Mutex::new(HashMap::new()),
        })
    }

    fn to_vector(&self, raw: &[f32]) -> Result<EmbeddingVector, EmbedError> {
        if raw.len() != self.config.dimension {
            return Err(EmbedError::DimensionMismatch {
                expected: self.config.dimension,
                actual: raw.len(),
            });
        }
        EmbeddingVector::new(raw.iter().map(|&v| f64::from(v)).collect())
    }

    fn fetch(&self, text: &str) -> Result<Vec<f32>, EmbedError> {
        let body = EmbedRequest {
            model: &self.config.model,
            input: text,
        };
        let resp: EmbedResponse = http::post_json(
            &self.agent,
            &self.http,
            &self.config.endpoint,
            self.config.api_key.as_deref(),
            &body,
        )
        .map_err(|f| match f {
            HttpFailure::Unavailable { attempts, reason } => EmbedError::ServiceUnavailable { attempts, reason },
            HttpFailure::Rejected(reason) => EmbedError::ServiceUnavailable { attempts: 1, reason },
        })?;
        let first = resp
            .data
            .into_iter()
            .next()
            .ok_or_else(|| EmbedError::ServiceUnavailable {
                attempts: 1,
                reason: "response carried no embeddings".into(),
            })?;
        Ok(first.embedding.into_iter().map(|v| v as f32).collect())
    }
}

impl EmbedBackend for RemoteEmbedder {
    fn dimension(&self) -> usize {
        self.config.dimension
    }

    fn model_id(&self) -> &str {
        &self.config.model
    }

    fn embed(&self, text: &str) -> Result<EmbeddingVector, EmbedError> {
        if let Some(hit) = self.memo.lock().expect("memo poisoned").get(text) {
            return self.to_vector(hit);
        }
        if let Some(cache) = &self.cache {
            if let Some(hit) = cache.get(&self.config.model, text)? {
                let v = self.to_vector(&hit)?;
                self.memo.lock().expect("memo poisoned").insert(text.to_string(), hit);
                return Ok(v);
            }
        }
        let raw = self.fetch(text)?;
        let v = self.to_vector(&raw)?;
        if let Some(cache) = &self.cache {
            cache.put(&self.config.model, text, &raw)?;
        }
        self.memo.lock().expect("memo poisoned").insert(text.to_string(), raw);
        Ok(v)
    }
}
