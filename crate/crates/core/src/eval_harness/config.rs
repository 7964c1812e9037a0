use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::HarnessError;
use crate::design_manual_rag::{LlmClient, RemoteLlmClient, RemoteLlmConfig, ScriptedLlmClient, TableLlmClient};
use crate::text_embed::{EmbedBackend, EmbeddingCache, OfflineEmbedder, RemoteEmbedder, RemoteEmbedderConfig};

/// Settings shared by all commands, read from a flat TOML file. Every field is
/// optional; command-line flags take precedence. Relative paths are resolved
/// against the directory holding the file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub osm: Option<PathBuf>,
    pub manual: Option<PathBuf>,
    pub metadata: Option<PathBuf>,
    pub lanewidths: Option<PathBuf>,
    pub suffixes: Option<PathBuf>,
    pub gt: Option<PathBuf>,
    pub pred: Option<PathBuf>,
    pub params: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,

    /// `offline` or `remote`.
    pub embed: Option<String>,
    pub embed_endpoint: Option<String>,
    pub embed_model: Option<String>,
    /// `remote`, `scripted:<path>` or `table:<path>`.
    pub llm: Option<String>,
    pub llm_endpoint: Option<String>,
    pub llm_model: Option<String>,

    pub d_text: Option<usize>,
    pub d_map: Option<usize>,
    pub hidden: Option<usize>,

    pub chunk_chars: Option<usize>,
    pub chunk_overlap: Option<usize>,
    pub top_k: Option<usize>,

    pub frechet_thresholds: Option<Vec<f64>>,
    pub topology_threshold: Option<f64>,
    pub element_iou: Option<f64>,

    pub parallelism: Option<usize>,
    pub seed: Option<u64>,
    pub lambda: Option<f64>,
    pub label: Option<String>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Parses the file, resolves relative paths and checks that every input
    /// path it names exists.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = super::files::read_to_string(path)?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in config.paths_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        config.check_inputs_exist()?;
        Ok(config)
    }

    fn paths_mut(&mut self) -> impl Iterator<Item = &mut PathBuf> {
        [
            &mut self.osm,
            &mut self.manual,
            &mut self.metadata,
            &mut self.lanewidths,
            &mut self.suffixes,
            &mut self.gt,
            &mut self.pred,
            &mut self.params,
            &mut self.cache_dir,
        ]
        .into_iter()
        .flatten()
    }

    fn check_inputs_exist(&self) -> Result<(), HarnessError> {
        let inputs = [&self.osm, &self.manual, &self.suffixes, &self.gt, &self.pred];
        for p in inputs.into_iter().flatten() {
            if !p.exists() {
                return Err(HarnessError::Config(format!("{} does not exist", p.display())));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let dims = [
            ("d_text", self.d_text),
            ("d_map", self.d_map),
            ("hidden", self.hidden),
            ("chunk_chars", self.chunk_chars),
            ("top_k", self.top_k),
            ("parallelism", self.parallelism),
        ];
        for (name, v) in dims {
            if v == Some(0) {
                return Err(HarnessError::Config(format!("{name} must be positive")));
            }
        }
        if let Some(e) = &self.embed {
            EmbedSpec::check_kind(e)?;
        }
        if let Some(l) = &self.llm {
            LlmSpec::parse(l)?;
        }
        Ok(())
    }
}

/// Which embedding backend to build.
#[derive(Debug, Clone, PartialEq)]
pub enum EmbedSpec {
    Offline {
        dimension: usize,
    },
    Remote {
        endpoint: String,
        model: String,
        dimension: usize,
        cache_dir: Option<PathBuf>,
    },
}

impl Default for EmbedSpec {
    fn default() -> Self {
        EmbedSpec::Offline {
            dimension: crate::text_embed::DEFAULT_DIMENSION,
        }
    }
}

impl EmbedSpec {
    fn check_kind(kind: &str) -> Result<(), HarnessError> {
        match kind {
            "offline" | "remote" => Ok(()),
            other => Err(HarnessError::Config(format!("unknown embed backend {other:?}"))),
        }
    }

    /// Backend named by a config, `d_text` defaulting to 1536.
    pub fn from_config(config: &RunConfig) -> Result<Self, HarnessError> {
        let kind = config.embed.as_deref().unwrap_or("offline");
        Self::check_kind(kind)?;
        let dimension = config.d_text.unwrap_or(crate::text_embed::DEFAULT_DIMENSION);
        if kind == "offline" {
            return Ok(EmbedSpec::Offline { dimension });
        }
        let defaults = RemoteEmbedderConfig::default();
        Ok(EmbedSpec::Remote {
            endpoint: config.embed_endpoint.clone().unwrap_or(defaults.endpoint),
            model: config.embed_model.clone().unwrap_or(defaults.model),
            dimension,
            cache_dir: config.cache_dir.clone(),
        })
    }

    pub fn dimension(&self) -> usize {
        match self {
            EmbedSpec::Offline { dimension } | EmbedSpec::Remote { dimension, .. } => *dimension,
        }
    }

    pub fn build(&self) -> Result<Box<dyn EmbedBackend>, HarnessError> {
        Ok(match self {
            EmbedSpec::Offline { dimension } => Box::new(OfflineEmbedder::new(*dimension)?),
            EmbedSpec::Remote {
                endpoint,
                model,
                dimension,
                cache_dir,
            } => {
                let cache = match cache_dir {
                    Some(dir) => Some(EmbeddingCache::open(dir).map_err(HarnessError::io(dir))?),
                    None => None,
                };
                let config = RemoteEmbedderConfig::new(endpoint.clone(), model.clone(), *dimension);
                Box::new(RemoteEmbedder::new(config, cache)?)
            }
        })
    }
}

/// Which lane-width answer source to use.
#[derive(Debug, Clone, PartialEq)]
pub enum LlmSpec {
    Remote {
        endpoint: Option<String>,
        model: Option<String>,
    },
    Scripted(PathBuf),
    Table(PathBuf),
}

impl LlmSpec {
    /// Parses `remote`, `scripted:<path>` or `table:<path>`.
    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        if s == "remote" {
            return Ok(LlmSpec::Remote {
                endpoint: None,
                model: None,
            });
        }
        let bad = || {
            HarnessError::Config(format!(
                "--llm expects remote, scripted:<path> or table:<path>, got {s:?}"
            ))
        };
        let (kind, path) = s.split_once(':').ok_or_else(bad)?;
        if path.is_empty() {
            return Err(bad());
        }
        match kind {
            "scripted" => Ok(LlmSpec::Scripted(path.into())),
            "table" => Ok(LlmSpec::Table(path.into())),
            _ => Err(bad()),
        }
    }

    pub fn is_remote(&self) -> bool {
        matches!(self, LlmSpec::Remote { .. })
    }

    pub fn build(&self) -> Result<Box<dyn LlmClient>, HarnessError> {
        Ok(match self {
            LlmSpec::Remote { endpoint, model } => {
                let mut config = RemoteLlmConfig::default();
                if let Some(e) = endpoint {
                    config.endpoint = e.clone();
                }
                if let Some(m) = model {
                    config.model = m.clone();
                }
                Box::new(RemoteLlmClient::new(config))
            }
            LlmSpec::Scripted(path) => Box::new(ScriptedLlmClient::from_json(&super::files::read_to_string(path)?)?),
            LlmSpec::Table(path) => Box::new(TableLlmClient::from_tsv(&super::files::read_to_string(path)?)?),
        })
    }
}
