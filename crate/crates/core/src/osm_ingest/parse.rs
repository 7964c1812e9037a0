use std::collections::{BTreeMap, HashMap};

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, Event};
use quick_xml::{Reader, Writer};

use super::{OsmError, RoadSegment};

/// Result of [`parse_osm`]: accepted road segments plus ways that were dropped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParseOutcome {
    pub segments: Vec<RoadSegment>,
    pub skipped: Vec<SkippedWay>,
}

/// A highway way dropped because fewer than two distinct points remained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedWay {
    pub way_id: i64,
    pub reason: String,
}

#[derive(Default)]
struct RawWay {
    id: i64,
    refs: Vec<i64>,
    tags: BTreeMap<String, String>,
}

fn attr_map(e: &BytesStart<'_>) -> Result<HashMap<String, String>, OsmError> {
    let mut out = HashMap::new();
    for attr in e.attributes() {
        let attr = attr.map_err(|err| OsmError::MalformedXml(err.to_string()))?;
        let key =
            String::from_utf8(attr.key.as_ref().to_vec()).map_err(|err| OsmError::MalformedXml(err.to_string()))?;
        let value = attr
            .unescape_value()
            .map_err(|err| OsmError::MalformedXml(err.to_string()))?
            .into_owned();
        out.insert(key, value);
    }
    Ok(out)
}

fn required<T: std::str::FromStr>(attrs: &HashMap<String, String>, key: &str, element: &str) -> Result<T, OsmError> {
    let raw = attrs
        .get(key)
        .ok_or_else(|| OsmError::MalformedXml(format!("<{element}> without `{key}`")))?;
    raw.parse()
        .map_err(|_| OsmError::MalformedXml(format!("<{element}> has invalid `{key}`={raw:?}")))
}

/// Parses the OSM XML subset (`node`, `way`, `nd`, `tag`) into road segments.
///
/// Only ways with a `highway` tag and without `area=yes` are kept. Consecutive
/// duplicate points are collapsed; a way left with fewer than two points is
/// skipped and listed in [`ParseOutcome::skipped`]. Output order follows the
/// document.
pub fn parse_osm(extract: &[u8]) -> Result<ParseOutcome, OsmError> {
    let mut reader = Reader::from_reader(extract);
    reader.config_mut().trim_text(true);

    let mut nodes: HashMap<i64, (f64, f64)> = HashMap::new();
    let mut ways: Vec<RawWay> = Vec::new();
    let mut current: Option<RawWay> = None;
    let mut depth = 0usize;
    let mut buf = Vec::new();

    loop {
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| OsmError::MalformedXml(format!("at byte {}: {e}", reader.buffer_position())))?;
        let (element, is_empty) = match &event {
            Event::Start(e) => (Some(e.clone()), false),
            Event::Empty(e) => (Some(e.clone()), true),
            Event::End(e) => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| OsmError::MalformedXml("unbalanced end tag".into()))?;
                if e.name().as_ref() == b"way" {
                    if let Some(way) = current.take() {
                        ways.push(way);
                    }
                }
                buf.clear();
                continue;
            }
            Event::Eof => break,
            _ => (None, false),
        };
        if let Some(e) = element {
            match e.name().as_ref() {
                b"node" => {
                    let attrs = attr_map(&e)?;
                    let id: i64 = required(&attrs, "id", "node")?;
                    let lat: f64 = required(&attrs, "lat", "node")?;
                    let lon: f64 = required(&attrs, "lon", "node")?;
                    if !lat.is_finite() || !lon.is_finite() {
                        return Err(OsmError::MalformedXml(format!("node {id} has non-finite coordinates")));
                    }
                    nodes.insert(id, (lon, lat));
                }
                b"way" => {
                    let attrs = attr_map(&e)?;
                    let way = RawWay {
                        id: required(&attrs, "id", "way")?,
                        ..RawWay::default()
                    };
                    if is_empty {
                        ways.push(way);
                    } else {
                        current = Some(way);
                    }
                }
                b"nd" => {
                    if let Some(way) = current.as_mut() {
                        let attrs = attr_map(&e)?;
                        way.refs.push(required(&attrs, "ref", "nd")?);
                    }
                }
                b"tag" => {
                    if let Some(way) = current.as_mut() {
                        let attrs = attr_map(&e)?;
                        let k: String = required(&attrs, "k", "tag")?;
                        let v = attrs.get("v").cloned().unwrap_or_default();
                        way.tags.insert(k, v);
                    }
                }
                _ => {}
            }
            if !is_empty {
                depth += 1;
            }
        }
        buf.clear();
    }
    if depth != 0 || current.is_some() {
        return Err(OsmError::MalformedXml("unexpected end of document".into()));
    }

    let mut outcome = ParseOutcome::default();
    for way in ways {
        if !way.tags.contains_key("highway") || way.tags.get("area").map(String::as_str) == Some("yes") {
            continue;
        }
        let mut polyline: Vec<(f64, f64)> = Vec::with_capacity(way.refs.len());
        for node_id in &way.refs {
            let point = *nodes.get(node_id).ok_or(OsmError::DanglingNodeRef {
                way_id: way.id,
                node_id: *node_id,
            })?;
            if polyline.last() != Some(&point) {
                polyline.push(point);
            }
        }
        if polyline.len() < 2 {
            outcome.skipped.push(SkippedWay {
                way_id: way.id,
                reason: format!("{} distinct point(s), need at least 2", polyline.len()),
            });
            continue;
        }
        let name = way.tags.get("name").cloned();
        outcome.segments.push(RoadSegment {
            way_id: way.id,
            polyline,
            tags: way.tags,
            name,
        });
    }
    Ok(outcome)
}

/// Writes segments back out as OSM XML. Node ids are synthesized sequentially;
/// coordinates use shortest round-trip formatting so re-parsing is exact.
pub fn emit_osm(segments: &[RoadSegment]) -> String {
    let mut writer = Writer::new_with_indent(Vec::new(), b' ', 2);
    let io = |r: std::io::Result<()>| r.expect("writing to a Vec cannot fail");
    io(writer.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None))));
    let mut osm = BytesStart::new("osm");
    osm.push_attribute(("version", "0.6"));
    io(writer.write_event(Event::Start(osm)));

    let mut next_id = 1i64;
    let mut refs: Vec<Vec<i64>> = Vec::with_capacity(segments.len());
    for seg in segments {
        let mut ids = Vec::with_capacity(seg.polyline.len());
        for &(lon, lat) in &seg.polyline {
            let mut node = BytesStart::new("node");
            node.push_attribute(("id", next_id.to_string().as_str()));
            node.push_attribute(("lat", lat.to_string().as_str()));
            node.push_attribute(("lon", lon.to_string().as_str()));
            io(writer.write_event(Event::Empty(node)));
            ids.push(next_id);
            next_id += 1;
        }
        refs.push(ids);
    }
    for (seg, ids) in segments.iter().zip(&refs) {
        let mut way = BytesStart::new("way");
        way.push_attribute(("id", seg.way_id.to_string().as_str()));
        io(writer.write_event(Event::Start(way)));
        for id in ids {
            let mut nd = BytesStart::new("nd");
            nd.push_attribute(("ref", id.to_string().as_str()));
            io(writer.write_event(Event::Empty(nd)));
        }
        for (k, v) in &seg.tags {
            let mut tag = BytesStart::new("tag");
            tag.push_attribute(("k", k.as_str()));
            tag.push_attribute(("v", v.as_str()));
            io(writer.write_event(Event::Empty(tag)));
        }
        io(writer.write_event(Event::End(BytesEnd::new("way"))));
    }
    io(writer.write_event(Event::End(BytesEnd::new("osm"))));
    let mut out = String::from_utf8(writer.into_inner()).expect("writer emits UTF-8");
    out.push('\n');
    out
}
