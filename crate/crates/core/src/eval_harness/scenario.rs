use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use super::HarnessError;
use crate::topo_metrics::TopologySet;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EgoPose {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
}

/// One annotated or predicted frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    /// Integers in the file are read as their decimal string.
    #[serde(deserialize_with = "frame_id_from_any")]
    pub frame_id: String,
    #[serde(default)]
    pub ego_pose: EgoPose,
    #[serde(flatten)]
    pub topology: TopologySet,
}

fn frame_id_from_any<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Id {
        Text(String),
        Int(i64),
    }
    Ok(match Id::deserialize(d)? {
        Id::Text(s) => s,
        Id::Int(i) => i.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScenarioFile {
    #[serde(default)]
    pub city: String,
    pub frames: Vec<Frame>,
}

impl ScenarioFile {
    /// Parses JSON and checks frame-id uniqueness and each topology.
    pub fn from_json(text: &str, vocabulary: Option<&[String]>) -> Result<Self, String> {
        let scenario: ScenarioFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        scenario.validate(vocabulary)?;
        Ok(scenario)
    }

    pub fn load(path: &Path, vocabulary: Option<&[String]>) -> Result<Self, HarnessError> {
        let text = super::files::read_to_string(path)?;
        Self::from_json(&text, vocabulary).map_err(|reason| HarnessError::Schema {
            path: path.to_path_buf(),
            reason,
        })
    }

    pub fn validate(&self, vocabulary: Option<&[String]>) -> Result<(), String> {
        let mut seen = HashSet::new();
        for f in &self.frames {
            if !seen.insert(f.frame_id.as_str()) {
                return Err(format!("duplicate frame_id {:?}", f.frame_id));
            }
            f.topology
                .validate(vocabulary)
                .map_err(|e| format!("frame {:?}: {e}", f.frame_id))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}
