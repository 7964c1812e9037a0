use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use super::files::{read_to_string, write_atomic, write_vector_file};
use super::report::{read_reports, render_table_flagged};
use super::{EmbedSpec, HarnessError, LlmSpec, ScenarioFile};
use crate::design_manual_rag::{
    build_store, chunk_manual, lane_width_text, query_lane_width, read_answers_file, write_answers_file,
    LaneWidthAnswer, DEFAULT_TOP_K,
};
use crate::osm_ingest::{
    escape_field, parse_osm, read_metadata_file, write_metadata_file, MetadataRecord, RoadSegment, SkippedWay,
    SuffixVocabulary,
};
use crate::prior_fusion::{
    combine_text, fuse_additive, fuse_weighted, graph_embed_polyline, project_to_local, read_params, train_fusion_toy,
    write_loss_csv, write_params, FusionError, FusionParams, PolylineEmbedding, Sample, TrainConfig, Trainable,
};
use crate::text_embed::{embed_text, EmbeddingVector};
use crate::topo_metrics::{evaluate_frames, MetricConfig, MetricReport, TopologySet};

pub const DEFAULT_PARALLELISM: usize = 4;
pub const DEFAULT_D_MAP: usize = 256;
pub const DEFAULT_CHUNK_CHARS: usize = 1000;
pub const DEFAULT_CHUNK_OVERLAP: usize = 200;

fn pool(threads: usize) -> Result<rayon::ThreadPool, HarnessError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))
}

/// `<path>.<ext>`, keeping any existing extension.
pub fn sidecar_path(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn write_errors(path: &Path, rows: &[(i64, String)]) -> Result<(), HarnessError> {
    let mut out = String::new();
    for (id, msg) in rows {
        out.push_str(&format!("{id}\t{}\n", escape_field(msg)));
    }
    write_atomic(path, out.as_bytes())
}

fn load_segments(path: &Path) -> Result<(Vec<RoadSegment>, Vec<SkippedWay>), HarnessError> {
    let bytes = std::fs::read(path).map_err(HarnessError::io(path))?;
    let parsed = parse_osm(&bytes)?;
    Ok((parsed.segments, parsed.skipped))
}

fn load_metadata(path: &Path) -> Result<Vec<MetadataRecord>, HarnessError> {
    let text = read_to_string(path)?;
    Ok(read_metadata_file(text.as_bytes())?)
}

#[derive(Debug, Clone)]
pub struct ExtractArgs {
    pub osm: PathBuf,
    pub out: PathBuf,
    /// TOML suffix vocabulary; the built-in list when absent.
    pub suffixes: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractOutcome {
    pub records: usize,
    /// Also written to `<out>.skipped`.
    pub skipped: Vec<SkippedWay>,
}

/// OSM extract to metadata file, one line per road in way-id order.
pub fn cmd_extract_metadata(args: &ExtractArgs) -> Result<ExtractOutcome, HarnessError> {
    let vocabulary = match &args.suffixes {
        Some(p) => SuffixVocabulary::from_toml(&read_to_string(p)?)?,
        None => SuffixVocabulary::default(),
    };
    let (segments, skipped) = load_segments(&args.osm)?;
    let records: Vec<MetadataRecord> = segments
        .iter()
        .map(|s| MetadataRecord::from_segment(s, &vocabulary))
        .collect();
    let mut buf = Vec::new();
    write_metadata_file(&mut buf, &records).map_err(HarnessError::io(&args.out))?;
    write_atomic(&args.out, &buf)?;
    let skipped_rows: Vec<(i64, String)> = skipped.iter().map(|s| (s.way_id, s.reason.clone())).collect();
    write_errors(&sidecar_path(&args.out, "skipped"), &skipped_rows)?;
    for s in &skipped {
        log::warn!("skipped way {}: {}", s.way_id, s.reason);
    }
    Ok(ExtractOutcome {
        records: records.len(),
        skipped,
    })
}

#[derive(Debug, Clone)]
pub struct LaneWidthArgs {
    pub metadata: PathBuf,
    pub manual: PathBuf,
    pub llm: LlmSpec,
    pub out: PathBuf,
    /// Supplies the highway class of each road to the prompt and the table
    /// backend; the metadata file does not carry it.
    pub osm: Option<PathBuf>,
    pub embed: EmbedSpec,
    pub chunk_chars: usize,
    pub chunk_overlap: usize,
    pub top_k: usize,
    pub parallelism: usize,
}

impl LaneWidthArgs {
    pub fn new(metadata: PathBuf, manual: PathBuf, llm: LlmSpec, out: PathBuf) -> Self {
        Self {
            metadata,
            manual,
            llm,
            out,
            osm: None,
            embed: EmbedSpec::default(),
            chunk_chars: DEFAULT_CHUNK_CHARS,
            chunk_overlap: DEFAULT_CHUNK_OVERLAP,
            top_k: DEFAULT_TOP_K,
            parallelism: DEFAULT_PARALLELISM,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaneWidthOutcome {
    pub answered: usize,
    /// `(way_id, message)`, also written to `<out>.errors`.
    pub failures: Vec<(i64, String)>,
}

/// Asks for a lane width per road. Failed roads go to the sidecar; only a
/// fatal error with the remote LLM aborts the run.
pub fn cmd_lanewidths(args: &LaneWidthArgs) -> Result<LaneWidthOutcome, HarnessError> {
    let records = load_metadata(&args.metadata)?;
    let classes: HashMap<i64, String> = match &args.osm {
        Some(p) => load_segments(p)?
            .0
            .into_iter()
            .filter_map(|s| s.road_class().map(|c| (s.way_id, c.to_string())))
            .collect(),
        None => HashMap::new(),
    };
    let manual = read_to_string(&args.manual)?;
    let backend = args.embed.build()?;
    let llm = args.llm.build()?;
    let chunks = chunk_manual(&manual, args.chunk_chars, args.chunk_overlap)?;
    let pool = pool(args.parallelism)?;
    let store = pool.install(|| build_store(chunks, backend.as_ref()))?;
    let results: Vec<_> = pool.install(|| {
        records
            .par_iter()
            .map(|r| {
                let class = classes.get(&r.way_id).map(String::as_str);
                query_lane_width(r, class, &store, llm.as_ref(), backend.as_ref(), args.top_k)
            })
            .collect()
    });

    let mut answers = Vec::new();
    let mut failures = Vec::new();
    for (record, result) in records.iter().zip(results) {
        match result {
            Ok(a) => answers.push(a),
            Err(e) if args.llm.is_remote() && e.is_fatal() => return Err(e.into()),
            Err(e) => {
                log::warn!("way {}: {e}", record.way_id);
                failures.push((record.way_id, e.to_string()));
            }
        }
    }
    let mut buf = Vec::new();
    write_answers_file(&mut buf, &answers).map_err(HarnessError::io(&args.out))?;
    write_atomic(&args.out, &buf)?;
    write_errors(&sidecar_path(&args.out, "errors"), &failures)?;
    Ok(LaneWidthOutcome {
        answered: answers.len(),
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuseVariant {
    /// `G + MLP(o)`.
    Eq1,
    /// `G + λ·MLP(o)`.
    Eq2,
    /// `G + MLP(o + l)`.
    Eq3,
}

impl FromStr for FuseVariant {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eq1" => Ok(FuseVariant::Eq1),
            "eq2" => Ok(FuseVariant::Eq2),
            "eq3" => Ok(FuseVariant::Eq3),
            other => Err(HarnessError::Config(format!(
                "unknown variant {other:?}, expected eq1, eq2 or eq3"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FuseArgs {
    pub variant: FuseVariant,
    pub metadata: PathBuf,
    pub osm: PathBuf,
    pub lanewidths: Option<PathBuf>,
    /// Read when it exists, otherwise seeded and written here.
    pub params: Option<PathBuf>,
    pub seed: u64,
    /// Replaces the λ of the loaded or seeded parameters.
    pub lambda: Option<f64>,
    pub d_map: Option<usize>,
    pub hidden: Option<usize>,
    pub embed: EmbedSpec,
    pub out: PathBuf,
    pub graph_out: Option<PathBuf>,
    pub parallelism: usize,
}

impl FuseArgs {
    pub fn new(variant: FuseVariant, metadata: PathBuf, osm: PathBuf, out: PathBuf) -> Self {
        Self {
            variant,
            metadata,
            osm,
            lanewidths: None,
            params: None,
            seed: 0,
            lambda: None,
            d_map: None,
            hidden: None,
            embed: EmbedSpec::default(),
            out,
            graph_out: None,
            parallelism: DEFAULT_PARALLELISM,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuseOutcome {
    pub roads: usize,
    /// eq3 roads with no lane width, fused with a zero lane-width vector.
    pub without_width: Vec<i64>,
    pub params: FusionParams,
}

fn load_or_seed_params(args: &FuseArgs, d_text: usize) -> Result<FusionParams, HarnessError> {
    let existing = args.params.as_ref().filter(|p| p.exists());
    let mut params = match existing {
        Some(path) => {
            let file = std::fs::File::open(path).map_err(HarnessError::io(path))?;
            let (params, _seed) = read_params(std::io::BufReader::new(file))?;
            let m = &params.mlp;
            let want = [Some(d_text), args.hidden, args.d_map];
            let have = [m.d_text(), m.hidden(), m.d_map()];
            for ((w, h), name) in want.iter().zip(have).zip(["d_text", "hidden", "d_map"]) {
                if let Some(w) = w {
                    if *w != h {
                        return Err(FusionError::DimensionMismatch {
                            context: name,
                            expected: *w,
                            actual: h,
                        }
                        .into());
                    }
                }
            }
            params
        }
        None => {
            let d_map = args.d_map.unwrap_or(DEFAULT_D_MAP);
            let hidden = args.hidden.unwrap_or(d_map);
            let mut params = FusionParams::seeded(d_text, hidden, d_map, args.seed)?;
            if let Some(l) = args.lambda {
                params.lambda = l;
            }
            if let Some(path) = &args.params {
                let mut buf = Vec::new();
                write_params(&mut buf, &params, args.seed)?;
                write_atomic(path, &buf)?;
            }
            params
        }
    };
    if let Some(l) = args.lambda {
        params.lambda = l;
    }
    Ok(params)
}

/// Center of the bounding box of every vertex, in (lon, lat).
fn extract_origin<'a>(segments: impl Iterator<Item = &'a RoadSegment>) -> (f64, f64) {
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in segments.flat_map(|s| &s.polyline) {
        lo = (lo.0.min(x), lo.1.min(y));
        hi = (hi.0.max(x), hi.1.max(y));
    }
    if lo.0.is_finite() {
        ((lo.0 + hi.0) / 2.0, (lo.1 + hi.1) / 2.0)
    } else {
        (0.0, 0.0)
    }
}

/// Per-road fused embeddings. Roads are those of the metadata file; each must
/// appear in the OSM extract.
pub fn cmd_fuse(args: &FuseArgs) -> Result<FuseOutcome, HarnessError> {
    if args.variant == FuseVariant::Eq3 && args.lanewidths.is_none() {
        return Err(HarnessError::MissingLaneWidths);
    }
    let records = load_metadata(&args.metadata)?;
    let (segments, _) = load_segments(&args.osm)?;
    let by_id: HashMap<i64, &RoadSegment> = segments.iter().map(|s| (s.way_id, s)).collect();
    let mut roads = Vec::with_capacity(records.len());
    for r in &records {
        let seg = by_id.get(&r.way_id).ok_or_else(|| HarnessError::Schema {
            path: args.metadata.clone(),
            reason: format!("way {} is not in {}", r.way_id, args.osm.display()),
        })?;
        roads.push((r, *seg));
    }
    let widths: HashMap<i64, f64> = match &args.lanewidths {
        Some(p) => read_answers_file(read_to_string(p)?.as_bytes())?
            .into_iter()
            .map(|a: LaneWidthAnswer| (a.way_id, a.width_m))
            .collect(),
        None => HashMap::new(),
    };
    let backend = args.embed.build()?;
    let params = load_or_seed_params(args, backend.dimension())?;
    let d_map = params.mlp.d_map();
    let origin = extract_origin(roads.iter().map(|(_, s)| *s));

    let fuse_one = |record: &MetadataRecord, seg: &RoadSegment| -> Result<(Vec<f64>, Vec<f64>), HarnessError> {
        let graph: PolylineEmbedding = graph_embed_polyline(&project_to_local(&seg.polyline, origin), d_map)?;
        let o = embed_text(backend.as_ref(), &record.canonical())?;
        let fused = match args.variant {
            FuseVariant::Eq1 => fuse_additive(&graph, &o, &params.mlp)?,
            FuseVariant::Eq2 => fuse_weighted(&graph, &o, &params)?,
            FuseVariant::Eq3 => {
                let l = match widths.get(&record.way_id) {
                    Some(&w) => embed_text(backend.as_ref(), &lane_width_text(w))?,
                    None => EmbeddingVector::zeros(o.dim()),
                };
                fuse_additive(&graph, &combine_text(&o, &l)?, &params.mlp)?
            }
        };
        Ok((graph.0, fused))
    };
    let results: Vec<_> = pool(args.parallelism)?.install(|| {
        roads
            .par_iter()
            .map(|(r, s)| fuse_one(r, s))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut fused = BTreeMap::new();
    let mut graphs = BTreeMap::new();
    for ((record, _), (g, e)) in roads.iter().zip(results) {
        graphs.insert(record.way_id, g);
        fused.insert(record.way_id, e);
    }
    write_vector_file(&args.out, &fused)?;
    if let Some(p) = &args.graph_out {
        write_vector_file(p, &graphs)?;
    }
    let without_width = match args.variant {
        FuseVariant::Eq3 => records
            .iter()
            .map(|r| r.way_id)
            .filter(|id| !widths.contains_key(id))
            .collect(),
        _ => Vec::new(),
    };
    Ok(FuseOutcome {
        roads: records.len(),
        without_width,
        params,
    })
}

#[derive(Debug, Clone)]
pub enum EvaluateArgs {
    Files {
        gt: PathBuf,
        pred: PathBuf,
        label: String,
        out: Option<PathBuf>,
        metrics: MetricConfig,
        parallelism: usize,
    },
    /// Four metric columns given directly; OLS is computed from them.
    Values {
        label: String,
        values: [f64; 4],
        out: Option<PathBuf>,
    },
}

fn align<'a>(
    gt: &'a ScenarioFile,
    pred: &'a ScenarioFile,
) -> Result<Vec<(String, &'a TopologySet, &'a TopologySet)>, HarnessError> {
    let preds: HashMap<&str, &TopologySet> = pred.frames.iter().map(|f| (f.frame_id.as_str(), &f.topology)).collect();
    let gt_ids: HashSet<&str> = gt.frames.iter().map(|f| f.frame_id.as_str()).collect();
    let mut missing: Vec<&str> = gt_ids.iter().filter(|id| !preds.contains_key(*id)).copied().collect();
    let mut extra: Vec<&str> = preds.keys().filter(|id| !gt_ids.contains(*id)).copied().collect();
    if !missing.is_empty() || !extra.is_empty() {
        missing.sort_unstable();
        extra.sort_unstable();
        return Err(HarnessError::FrameMismatch(format!(
            "missing from prediction: {missing:?}; not in ground truth: {extra:?}"
        )));
    }
    if gt.frames.is_empty() {
        return Err(HarnessError::FrameMismatch("ground truth has no frames".into()));
    }
    Ok(gt
        .frames
        .iter()
        .map(|f| (f.frame_id.clone(), preds[f.frame_id.as_str()], &f.topology))
        .collect())
}

/// Scores aligned frames and averages each metric over frames, every frame
/// weighted equally.
pub fn evaluate_scenarios(
    gt: &ScenarioFile,
    pred: &ScenarioFile,
    label: &str,
    metrics: &MetricConfig,
) -> Result<MetricReport, HarnessError> {
    metrics.validate()?;
    let triples = align(gt, pred)?;
    let frames = evaluate_frames(&triples, metrics)?;
    Ok(MetricReport::from_frames(label, frames)?)
}

/// File-level [`evaluate_scenarios`]; writes the report as JSON when `out` is
/// set.
pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<MetricReport, HarnessError> {
    let (report, out) = match args {
        EvaluateArgs::Values { label, values, out } => {
            let [a, b, c, d] = *values;
            (MetricReport::from_values(label, a, b, c, d)?, out)
        }
        EvaluateArgs::Files {
            gt,
            pred,
            label,
            out,
            metrics,
            parallelism,
        } => {
            metrics.validate()?;
            let vocab = metrics.attribute_vocabulary.as_deref();
            let gt = ScenarioFile::load(gt, vocab)?;
            let pred = ScenarioFile::load(pred, vocab)?;
            let report = pool(*parallelism)?.install(|| evaluate_scenarios(&gt, &pred, label, metrics))?;
            (report, out)
        }
    };
    if let Some(path) = out {
        let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
        json.push('\n');
        write_atomic(path, json.as_bytes())?;
    }
    Ok(report)
}

/// Comparison table over report files, rows in argument order.
pub fn cmd_report(files: &[PathBuf]) -> Result<String, HarnessError> {
    if files.is_empty() {
        return Err(HarnessError::Config("report needs at least one file".into()));
    }
    let mut reports = Vec::new();
    for f in files {
        reports.extend(read_reports(f)?);
    }
    Ok(render_table_flagged(&reports))
}

#[derive(Debug, Clone)]
pub struct TrainToyArgs {
    pub seed: u64,
    pub samples: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub lambda_true: f64,
    pub d_text: usize,
    pub hidden: usize,
    pub d_map: usize,
    pub params_out: Option<PathBuf>,
    pub loss_out: Option<PathBuf>,
}

impl Default for TrainToyArgs {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 32,
            epochs: 500,
            learning_rate: 0.01,
            lambda_true: 0.5,
            d_text: 6,
            hidden: 4,
            d_map: 5,
            params_out: None,
            loss_out: None,
        }
    }
}

/// Fits λ on targets generated with `lambda_true` and a fixed seeded MLP,
/// starting from λ = 1 with the MLP frozen. Returns the learned parameters.
pub fn cmd_train_toy(args: &TrainToyArgs) -> Result<crate::prior_fusion::TrainOutcome, HarnessError> {
    let mut truth = FusionParams::seeded(args.d_text, args.hidden, args.d_map, args.seed)?;
    truth.lambda = args.lambda_true;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(1));
    let mut data = Vec::with_capacity(args.samples);
    for _ in 0..args.samples {
        let graph = PolylineEmbedding((0..args.d_map).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let text = EmbeddingVector::new((0..args.d_text).map(|_| rng.gen_range(-2.0..2.0)).collect())?;
        let target = fuse_weighted(&graph, &text, &truth)?;
        data.push(Sample { graph, text, target });
    }
    let mut init = truth;
    init.lambda = 1.0;
    let config = TrainConfig {
        epochs: args.epochs,
        learning_rate: args.learning_rate,
        trainable: Trainable::LAMBDA_ONLY,
    };
    let outcome = train_fusion_toy(init, &data, config)?;
    if let Some(p) = &args.params_out {
        let mut buf = Vec::new();
        write_params(&mut buf, &outcome.params, args.seed)?;
        write_atomic(p, &buf)?;
    }
    if let Some(p) = &args.loss_out {
        let mut buf = Vec::new();
        write_loss_csv(&mut buf, &outcome.losses).map_err(HarnessError::io(p))?;
        write_atomic(p, &buf)?;
    }
    Ok(outcome)
}
