use std::collections::{BTreeMap, HashMap};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{format_width, RagError};
use crate::osm_ingest::MetadataRecord;
use crate::text_embed::http::{self, HttpFailure, HttpSettings};

pub const LLM_API_KEY_ENV: &str = "LTP_LLM_API_KEY";

/// Everything a client may use to answer one road's lane-width query.
#[derive(Debug, Clone, Copy)]
pub struct LaneWidthRequest<'a> {
    pub way_id: i64,
    /// OSM `highway` class, when known.
    pub road_class: Option<&'a str>,
    pub road: &'a MetadataRecord,
    pub prompt: &'a str,
}

pub trait LlmClient: Send + Sync {
    fn complete(&self, request: &LaneWidthRequest<'_>) -> Result<String, RagError>;
}

#[derive(Debug, Clone)]
pub struct RemoteLlmConfig {
    /// Full URL of the chat-completions endpoint.
    pub endpoint: String,
    pub model: String,
    pub api_key: Option<String>,
    pub timeout: Duration,
    pub max_attempts: u32,
    pub backoff: Duration,
}

impl Default for RemoteLlmConfig {
    fn default() -> Self {
        let http = HttpSettings::default();
        Self {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "llama-3.3-70b-instruct".into(),
            api_key: std::env::var(LLM_API_KEY_ENV).ok(),
            timeout: http.timeout,
            max_attempts: http.max_attempts,
            backoff: http.backoff,
        }
    }
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: Vec<ChatMessage<'a>>,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatReply,
}

#[derive(Deserialize)]
struct ChatReply {
    content: Option<String>,
}

/// Chat-completion client sending the prompt as a single user message.
pub struct RemoteLlmClient {
    config: RemoteLlmConfig,
    http: HttpSettings,
    agent: ureq::Agent,
}

impl RemoteLlmClient {
    pub fn new(config: RemoteLlmConfig) -> Self {
        let http = HttpSettings {
            timeout: config.timeout,
            max_attempts: config.max_attempts,
            backoff: config.backoff,
        };
        Self {
            agent: http::agent(&http),
            http,
            config,
        }
    }
}

impl LlmClient for RemoteLlmClient {
    fn complete(&self, request: &LaneWidthRequest<'_>) -> Result<String, RagError> {
        let body = ChatRequest {
            model: &self.config.model,
            messages: vec![ChatMessage {
                role: "user",
                content: request.prompt,
            }],
        };
        let resp: ChatResponse = http::post_json(
            &self.agent,
            &self.http,
            &self.config.endpoint,
            self.config.api_key.as_deref(),
            &body,
        )
        .map_err(|f| match f {
            HttpFailure::Unavailable { attempts, reason } => {
                RagError::ServiceUnavailable(format!("{reason} after {attempts} attempt(s)"))
            }
            HttpFailure::Rejected(reason) => RagError::ServiceUnavailable(reason),
        })?;
        Ok(resp
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .unwrap_or_default())
    }
}

/// Replays recorded responses keyed by way id.
#[derive(Debug, Clone, Default)]
pub struct ScriptedLlmClient {
    responses: HashMap<i64, String>,
}

impl ScriptedLlmClient {
    pub fn new(responses: HashMap<i64, String>) -> Self {
        Self { responses }
    }

    /// Reads a JSON object mapping way ids (as strings) to response text.
    pub fn from_json(text: &str) -> Result<Self, RagError> {
        let raw: BTreeMap<String, String> = serde_json::from_str(text).map_err(|e| RagError::Format {
            what: "scripted responses",
            reason: e.to_string(),
        })?;
        let mut responses = HashMap::with_capacity(raw.len());
        for (k, v) in raw {
            let id = k.parse().map_err(|_| RagError::Format {
                what: "scripted responses",
                reason: format!("key {k:?} is not a way id"),
            })?;
            responses.insert(id, v);
        }
        Ok(Self { responses })
    }
}

impl LlmClient for ScriptedLlmClient {
    fn complete(&self, request: &LaneWidthRequest<'_>) -> Result<String, RagError> {
        self.responses
            .get(&request.way_id)
            .cloned()
            .ok_or(RagError::NoScriptedResponse(request.way_id))
    }
}

/// Constant lookup of lane width by road class.
///
/// Keys tried in order: `suffix=<S>` for the name suffix, the OSM `highway`
/// class, then `*`. File format: `key<TAB>width_m` per line, `#` comments.
#[derive(Debug, Clone, Default)]
pub struct TableLlmClient {
    widths: HashMap<String, f64>,
}

impl TableLlmClient {
    pub fn new(widths: HashMap<String, f64>) -> Self {
        Self { widths }
    }

    pub fn from_tsv(text: &str) -> Result<Self, RagError> {
        let mut widths = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: String| RagError::Format {
                what: "width table",
                reason: format!("line {}: {reason}", i + 1),
            };
            let (key, w) = line
                .split_once('\t')
                .ok_or_else(|| bad("expected key<TAB>width".into()))?;
            let w: f64 = w.trim().parse().map_err(|_| bad(format!("invalid width {w:?}")))?;
            widths.insert(key.trim().to_string(), w);
        }
        Ok(Self { widths })
    }

    fn lookup(&self, request: &LaneWidthRequest<'_>) -> Option<f64> {
        let by_class = request.road_class.and_then(|c| self.widths.get(c));
        let by_suffix = || {
            request
                .road
                .suffix
                .as_ref()
                .and_then(|s| self.widths.get(&format!("suffix={s}")))
        };
        by_suffix().or(by_class).or_else(|| self.widths.get("*")).copied()
    }
}

impl LlmClient for TableLlmClient {
    fn complete(&self, request: &LaneWidthRequest<'_>) -> Result<String, RagError> {
        Ok(match self.lookup(request) {
            Some(w) => format_width(w),
            None => "no table entry for this road".to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text_embed::http::mock::MockServer;

    fn request<'a>(road: &'a MetadataRecord, class: Option<&'a str>) -> LaneWidthRequest<'a> {
        LaneWidthRequest {
            way_id: road.way_id,
            road_class: class,
            road,
            prompt: "PROMPT",
        }
    }

    #[test]
    fn table_lookup_order() {
        let t = TableLlmClient::from_tsv("# widths\nresidential\t3.6\nsuffix=Expressway\t3.7\n*\t3.3\n").unwrap();
        let mut road = MetadataRecord {
            way_id: 1,
            ..Default::default()
        };
        assert_eq!(
            t.complete(&request(&road, Some("residential"))).unwrap(),
            "WIDTH_M: 3.6"
        );
        road.suffix = Some("Expressway".into());
        assert_eq!(
            t.complete(&request(&road, Some("residential"))).unwrap(),
            "WIDTH_M: 3.7"
        );
        road.suffix = Some("Street".into());
        assert_eq!(
            t.complete(&request(&road, Some("residential"))).unwrap(),
            "WIDTH_M: 3.6"
        );
        road.suffix = None;
        assert_eq!(t.complete(&request(&road, None)).unwrap(), "WIDTH_M: 3.3");
        let strict = TableLlmClient::from_tsv("residential\t3.6").unwrap();
        assert!(super::super::parse_width_response(&strict.complete(&request(&road, None)).unwrap()).is_err());
        assert!(TableLlmClient::from_tsv("residential 3.6").is_err());
    }

    #[test]
    fn scripted_replay() {
        let s = ScriptedLlmClient::from_json(r#"{"5": "WIDTH_M: 3.2", "6": "unsure"}"#).unwrap();
        let road = MetadataRecord {
            way_id: 5,
            ..Default::default()
        };
        assert_eq!(s.complete(&request(&road, None)).unwrap(), "WIDTH_M: 3.2");
        let missing = MetadataRecord {
            way_id: 7,
            ..Default::default()
        };
        assert!(matches!(
            s.complete(&request(&missing, None)),
            Err(RagError::NoScriptedResponse(7))
        ));
        assert!(ScriptedLlmClient::from_json(r#"{"x": "y"}"#).is_err());
    }

    #[test]
    fn remote_chat_wire_format() {
        let server = MockServer::start(vec![(
            200,
            r#"{"choices":[{"message":{"role":"assistant","content":"WIDTH_M: 3.5"}}]}"#.into(),
        )]);
        let client = RemoteLlmClient::new(RemoteLlmConfig {
            endpoint: format!("{}/v1/chat/completions", server.url),
            model: "test-llm".into(),
            api_key: Some("k".into()),
            timeout: Duration::from_secs(5),
            max_attempts: 1,
            backoff: Duration::from_millis(1),
        });
        let road = MetadataRecord::default();
        assert_eq!(client.complete(&request(&road, None)).unwrap(), "WIDTH_M: 3.5");
        let reqs = server.finish();
        assert_eq!(
            reqs[0].body,
            serde_json::json!({"model": "test-llm", "messages": [{"role": "user", "content": "PROMPT"}]})
        );
        assert_eq!(reqs[0].authorization.as_deref(), Some("Bearer k"));
    }

    #[test]
    fn remote_unreachable() {
        let client = RemoteLlmClient::new(RemoteLlmConfig {
            endpoint: "http://127.0.0.1:9/v1/chat/completions".into(),
            model: "m".into(),
            api_key: None,
            timeout: Duration::from_secs(2),
            max_attempts: 2,
            backoff: Duration::from_millis(1),
        });
        let road = MetadataRecord::default();
        let err = client.complete(&request(&road, None)).unwrap_err();
        assert!(err.is_fatal());
    }
}
