use std::io::{BufRead, Write};

use super::{
    build_prompt, parse_width_response, retrieval_query, retrieve, LaneWidthRequest, LlmClient, RagError, VectorStore,
};
use crate::osm_ingest::MetadataRecord;
use crate::text_embed::EmbedBackend;

pub const MIN_WIDTH_M: f64 = 2.0;
pub const MAX_WIDTH_M: f64 = 6.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LaneWidthAnswer {
    pub way_id: i64,
    /// Per-lane width in meters, within `[MIN_WIDTH_M, MAX_WIDTH_M]`.
    pub width_m: f64,
    pub raw_response: String,
    pub retrieved_chunk_ids: Vec<usize>,
}

/// Text embedded to obtain the lane-width vector of a road.
pub fn lane_width_text(width_m: f64) -> String {
    format!("lane_width_m={width_m}")
}

/// Retrieve, prompt, ask, parse. Widths outside the sanity band are errors.
pub fn query_lane_width(
    road: &MetadataRecord,
    road_class: Option<&str>,
    store: &VectorStore,
    llm: &dyn LlmClient,
    backend: &dyn EmbedBackend,
    k: usize,
) -> Result<LaneWidthAnswer, RagError> {
    let ranked = retrieve(store, &retrieval_query(road, road_class), k, backend)?;
    let chunks: Vec<_> = ranked
        .iter()
        .map(|&(id, _)| store.get(id).expect("retrieved ids come from the store"))
        .collect();
    let prompt = build_prompt(road, &chunks);
    let raw_response = llm.complete(&LaneWidthRequest {
        way_id: road.way_id,
        road_class,
        road,
        prompt: &prompt,
    })?;
    let width_m = parse_width_response(&raw_response)?;
    if !(MIN_WIDTH_M..=MAX_WIDTH_M).contains(&width_m) {
        return Err(RagError::WidthOutOfRange(width_m));
    }
    Ok(LaneWidthAnswer {
        way_id: road.way_id,
        width_m,
        raw_response,
        retrieved_chunk_ids: ranked.into_iter().map(|(id, _)| id).collect(),
    })
}

/// `way_id<TAB>width_m<TAB>id,id,...` lines, in the given order.
pub fn write_answers_file<W: Write>(mut out: W, answers: &[LaneWidthAnswer]) -> std::io::Result<()> {
    for a in answers {
        let ids: Vec<String> = a.retrieved_chunk_ids.iter().map(usize::to_string).collect();
        writeln!(out, "{}\t{}\t{}", a.way_id, a.width_m, ids.join(","))?;
    }
    Ok(())
}

/// Reads an answers file; `raw_response` is not persisted and comes back empty.
pub fn read_answers_file<R: BufRead>(input: R) -> Result<Vec<LaneWidthAnswer>, RagError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let bad = |reason: &str| RagError::Format {
            what: "lane-width",
            reason: format!("line {}: {reason}", i + 1),
        };
        let cols: Vec<&str> = line.split('\t').collect();
        let [id, width, ids] = cols.as_slice() else {
            return Err(bad("expected 3 tab-separated columns"));
        };
        let retrieved_chunk_ids = if ids.is_empty() {
            Vec::new()
        } else {
            ids.split(',')
                .map(|s| s.parse().map_err(|_| bad("invalid chunk id")))
                .collect::<Result<_, _>>()?
        };
        out.push(LaneWidthAnswer {
            way_id: id.parse().map_err(|_| bad("invalid way id"))?,
            width_m: width.parse().map_err(|_| bad("invalid width"))?,
            raw_response: String::new(),
            retrieved_chunk_ids,
        });
    }
    Ok(out)
}
