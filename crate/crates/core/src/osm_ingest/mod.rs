//! OSM road ingestion and the per-road metadata text prior.
//!
//! Ways tagged `highway=*` become [`RoadSegment`]s. Each segment is reduced to
//! a [`MetadataRecord`] (all tags except the identity/geometry/class keys, plus
//! the road-name suffix) and serialized to a canonical `key=value; ...` string.

mod metadata;
mod parse;
mod suffix;

pub(crate) use metadata::escape_field;
pub use metadata::{
    extract_metadata, read_metadata_file, serialize_metadata, write_metadata_file, MetadataRecord, EXCLUDED_KEYS,
};
pub use parse::{emit_osm, parse_osm, ParseOutcome, SkippedWay};
pub use suffix::{road_suffix, SuffixVocabulary};

use std::collections::BTreeMap;

/// One OSM way carrying a `highway` tag.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadSegment {
    pub way_id: i64,
    /// `(lon, lat)` in WGS84 degrees, at least two points, no consecutive repeats.
    pub polyline: Vec<(f64, f64)>,
    pub tags: BTreeMap<String, String>,
    pub name: Option<String>,
}

impl RoadSegment {
    /// Value of the `highway` tag.
    pub fn road_class(&self) -> Option<&str> {
        self.tags.get("highway").map(String::as_str)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OsmError {
    #[error("malformed OSM XML: {0}")]
    MalformedXml(String),
    #[error("way {way_id} references undeclared node {node_id}")]
    DanglingNodeRef { way_id: i64, node_id: i64 },
    #[error("invalid metadata line {line}: {reason}")]
    MetadataFormat { line: usize, reason: String },
    #[error("invalid suffix vocabulary: {0}")]
    Vocabulary(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
