use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use super::{OsmError, RoadSegment, SuffixVocabulary};

/// Tag keys that never reach the text prior: identity, name, and the fields
/// already carried by the polyline encoder (geometry and road class).
pub const EXCLUDED_KEYS: [&str; 4] = ["osmid", "name", "geometry", "highway"];

const SUFFIX_KEY: &str = "suffix";
const FIELD_SEP: &str = "; ";

/// The retained metadata of one road, before embedding.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MetadataRecord {
    pub way_id: i64,
    pub fields: BTreeMap<String, String>,
    pub suffix: Option<String>,
}

impl MetadataRecord {
    pub fn from_segment(segment: &RoadSegment, vocabulary: &SuffixVocabulary) -> Self {
        let fields = segment
            .tags
            .iter()
            .filter(|(k, _)| !EXCLUDED_KEYS.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let suffix = segment.name.as_deref().and_then(|name| vocabulary.suffix_of(name));
        Self {
            way_id: segment.way_id,
            fields,
            suffix,
        }
    }

    /// Canonical text form; see [`serialize_metadata`].
    pub fn canonical(&self) -> String {
        serialize_metadata(self)
    }

    /// Inverse of [`serialize_metadata`]. A trailing `suffix=` pair is read back
    /// as the name suffix.
    pub fn from_canonical(way_id: i64, text: &str) -> Result<Self, String> {
        let mut record = MetadataRecord {
            way_id,
            ..Self::default()
        };
        if text.is_empty() {
            return Ok(record);
        }
        let pairs: Vec<&str> = text.split(FIELD_SEP).collect();
        for (i, pair) in pairs.iter().enumerate() {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| format!("pair {pair:?} has no `=`"))?;
            if i + 1 == pairs.len() && k == SUFFIX_KEY {
                record.suffix = Some(v.to_string());
            } else {
                record.fields.insert(k.to_string(), v.to_string());
            }
        }
        Ok(record)
    }
}

/// Metadata record for a segment using the default suffix vocabulary.
pub fn extract_metadata(segment: &RoadSegment) -> MetadataRecord {
    MetadataRecord::from_segment(segment, &SuffixVocabulary::default())
}

/// `key=value` pairs in ascending key order joined by `"; "`, with
/// `suffix=<S>` last when present. Empty values render as `key=`.
pub fn serialize_metadata(record: &MetadataRecord) -> String {
    let mut parts: Vec<String> = record.fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
    if let Some(s) = &record.suffix {
        parts.push(format!("{SUFFIX_KEY}={s}"));
    }
    parts.join(FIELD_SEP)
}

pub(crate) fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn unescape_field(s: &str) -> Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            other => return Err(format!("bad escape \\{}", other.map(String::from).unwrap_or_default())),
        }
    }
    Ok(out)
}

/// Writes `way_id<TAB>canonical_string` lines sorted by way id. Tabs, newlines
/// and backslashes inside the canonical string are backslash-escaped.
pub fn write_metadata_file<W: Write>(mut out: W, records: &[MetadataRecord]) -> std::io::Result<()> {
    let mut sorted: Vec<&MetadataRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.way_id);
    for r in sorted {
        writeln!(out, "{}\t{}", r.way_id, escape_field(&serialize_metadata(r)))?;
    }
    Ok(())
}

pub fn read_metadata_file<R: BufRead>(input: R) -> Result<Vec<MetadataRecord>, OsmError> {
    let mut records = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let bad = |reason: String| OsmError::MetadataFormat { line: lineno, reason };
        let (id, text) = line
            .split_once('\t')
            .ok_or_else(|| bad("missing tab separator".into()))?;
        let way_id: i64 = id.parse().map_err(|_| bad(format!("invalid way id {id:?}")))?;
        let text = unescape_field(text).map_err(bad)?;
        records.push(MetadataRecord::from_canonical(way_id, &text).map_err(bad)?);
    }
    Ok(records)
}
