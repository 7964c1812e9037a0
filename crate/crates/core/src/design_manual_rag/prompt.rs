use std::sync::LazyLock;

use regex::Regex;

use super::{ManualChunk, RagError};
use crate::osm_ingest::{serialize_metadata, MetadataRecord};

const FEET_TO_METERS: f64 = 0.3048;

static TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"WIDTH_M:").unwrap());
static TAG_VALUE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\s*([-+]?\d+(?:\.\d+)?)").unwrap());
static METERS: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:^|[^\w.])(\d+(?:\.\d+)?)\s*(?:meters?|metres?|m)\b").unwrap());
static NUMBER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\d+(?:\.\d+)?").unwrap());
static FEET_AFTER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)^\s*(?:ft|feet|foot)\b").unwrap());

/// Query text used to retrieve manual excerpts for one road.
pub fn retrieval_query(road: &MetadataRecord, road_class: Option<&str>) -> String {
    let info = serialize_metadata(road);
    match road_class {
        Some(class) => format!("lane width for a {class} road: {info}"),
        None => format!("lane width for a road: {info}"),
    }
}

/// Lane-width prompt for one road: instruction, the road's `basic_road_info`,
/// the retrieved excerpts in rank order, and the strict answer format.
pub fn build_prompt(road: &MetadataRecord, retrieved: &[&ManualChunk]) -> String {
    let info = serialize_metadata(road);
    let mut p = String::new();
    p.push_str(
        "You are assisting with road map reconstruction. Using only the road design \
manual excerpts below, determine the standard width of a single travel lane, in meters, \
for the road described by basic_road_info. If the manual gives the width in feet, \
convert it using 1 ft = 0.3048 m.\n\n",
    );
    p.push_str("basic_road_info: ");
    p.push_str(if info.is_empty() { "(no metadata)" } else { &info });
    p.push_str("\n\nManual excerpts:\n");
    for (rank, chunk) in retrieved.iter().enumerate() {
        p.push_str(&format!("<<<EXCERPT {} (chunk {})\n", rank + 1, chunk.chunk_id));
        p.push_str(&chunk.text);
        p.push_str(&format!("\n>>>END EXCERPT {}\n", rank + 1));
    }
    p.push_str("\nAnswer with exactly one line in the form:\nWIDTH_M: <number>\n");
    p
}

/// The tagged form the prompt asks for.
pub fn format_width(width_m: f64) -> String {
    format!("WIDTH_M: {width_m}")
}

/// Extracts a lane width in meters from free-form model output.
///
/// Order of preference: the number after the last `WIDTH_M:` tag; the first
/// standalone number followed by `m`/`meter(s)`/`metre(s)`; a lone number in
/// the text followed by `ft`/`feet`, converted at 0.3048 m/ft.
pub fn parse_width_response(text: &str) -> Result<f64, RagError> {
    let not_found = || RagError::WidthNotFound(text.to_string());
    if let Some(last) = TAG.find_iter(text).last() {
        if let Some(c) = TAG_VALUE.captures(&text[last.end()..]) {
            return c[1].parse().map_err(|_| not_found());
        }
    }
    if let Some(c) = METERS.captures(text) {
        return c[1].parse().map_err(|_| not_found());
    }
    let numbers: Vec<_> = NUMBER.find_iter(text).collect();
    if let [only] = numbers.as_slice() {
        if FEET_AFTER.is_match(&text[only.end()..]) {
            let feet: f64 = only.as_str().parse().map_err(|_| not_found())?;
            return Ok(feet * FEET_TO_METERS);
        }
    }
    Err(not_found())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text_embed::EmbeddingVector;
    use proptest::prelude::*;

    fn chunk(id: usize, text: &str) -> ManualChunk {
        ManualChunk {
            chunk_id: id,
            text: text.into(),
            span: (0, text.chars().count()),
            embedding: EmbeddingVector::zeros(2),
        }
    }

    #[test]
    fn tagged_values() {
        assert_eq!(parse_width_response("WIDTH_M: 3.6").unwrap(), 3.6);
        assert_eq!(
            parse_width_response("The standard is 12 feet. WIDTH_M: 3.6576").unwrap(),
            3.6576
        );
        assert_eq!(parse_width_response("WIDTH_M: 3.0\nrevised WIDTH_M:3.3").unwrap(), 3.3);
    }

    #[test]
    fn fallbacks() {
        let ft = parse_width_response("lane width shall be 12 feet").unwrap();
        assert!((ft - 12.0 * 0.3048).abs() < 1e-12);
        assert_eq!(parse_width_response("use 3.5 m lanes, 2 lanes").unwrap(), 3.5);
        assert_eq!(parse_width_response("about 3.25 meters per lane").unwrap(), 3.25);
        assert_eq!(parse_width_response("Lanes: 3.0m").unwrap(), 3.0);
    }

    #[test]
    fn not_found_cases() {
        for text in [
            "varies by context",
            "no guidance",
            "",
            "25 mph and 12 feet",
            "WIDTH_M: unknown",
        ] {
            assert!(
                matches!(parse_width_response(text), Err(RagError::WidthNotFound(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn prompt_contents() {
        let mut road = MetadataRecord {
            way_id: 1,
            ..Default::default()
        };
        road.fields.insert("lanes".into(), "2".into());
        road.suffix = Some("Street".into());
        let a = chunk(3, "Urban streets: 11 ft lanes.");
        let b = chunk(0, "Freeways: 12 ft lanes.");
        let p = build_prompt(&road, &[&a, &b]);
        assert_eq!(p, build_prompt(&road, &[&a, &b]));
        assert!(p.contains("lanes=2; suffix=Street"));
        assert!(p.contains(&a.text) && p.contains(&b.text));
        assert!(p.find(&a.text).unwrap() < p.find(&b.text).unwrap());
        assert!(p.contains("WIDTH_M: <number>"));
    }

    proptest! {
        #[test]
        fn tagged_round_trip(w in 0.0f64..100.0) {
            prop_assert_eq!(parse_width_response(&format_width(w)).unwrap(), w);
        }
    }
}
