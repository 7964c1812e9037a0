#![allow(dead_code)]

use std::path::{Path, PathBuf};

use ltp_core::eval_harness::{
    cmd_evaluate, cmd_extract_metadata, cmd_fuse, cmd_lanewidths, EgoPose, EmbedSpec, EvaluateArgs, ExtractArgs, Frame,
    FuseArgs, FuseVariant, LaneWidthArgs, LlmSpec, ScenarioFile,
};
use ltp_core::topo_metrics::{LaneCenterline, MetricConfig, ScoredPair, TopologySet, TrafficElement};
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub const PIPELINE_D_TEXT: usize = 256;
pub const PIPELINE_D_MAP: usize = 32;

/// Every file the offline pipeline writes under `dir`, in stage order.
pub const PIPELINE_FILES: [&str; 11] = [
    "metadata.tsv",
    "metadata.tsv.skipped",
    "lanewidths.tsv",
    "lanewidths.tsv.errors",
    "params.bin",
    "graph.tsv",
    "fused_eq1.tsv",
    "fused_eq2.tsv",
    "fused_eq3.tsv",
    "report.json",
    "report.md",
];

/// Offline embedder, scripted LLM, fixed seed: extract, lanewidths, fuse
/// (all three variants), evaluate, report. Stages whose output already
/// exists are still rerun.
pub fn run_offline_pipeline(dir: &Path) {
    let p = |name: &str| dir.join(name);
    let embed = EmbedSpec::Offline {
        dimension: PIPELINE_D_TEXT,
    };
    cmd_extract_metadata(&ExtractArgs {
        osm: fixture("city.osm"),
        out: p("metadata.tsv"),
        suffixes: None,
    })
    .unwrap();

    let mut lw = LaneWidthArgs::new(
        p("metadata.tsv"),
        fixture("manual.txt"),
        LlmSpec::Scripted(fixture("scripted.json")),
        p("lanewidths.tsv"),
    );
    lw.osm = Some(fixture("city.osm"));
    lw.embed = embed.clone();
    lw.chunk_chars = 300;
    lw.chunk_overlap = 60;
    cmd_lanewidths(&lw).unwrap();

    for (variant, out) in [
        (FuseVariant::Eq1, "fused_eq1.tsv"),
        (FuseVariant::Eq2, "fused_eq2.tsv"),
        (FuseVariant::Eq3, "fused_eq3.tsv"),
    ] {
        let mut args = FuseArgs::new(variant, p("metadata.tsv"), fixture("city.osm"), p(out));
        args.params = Some(p("params.bin"));
        args.seed = 17;
        args.d_map = Some(PIPELINE_D_MAP);
        args.embed = embed.clone();
        args.graph_out = Some(p("graph.tsv"));
        if variant == FuseVariant::Eq2 {
            args.lambda = Some(0.869);
        }
        if variant == FuseVariant::Eq3 {
            args.lanewidths = Some(p("lanewidths.tsv"));
        }
        cmd_fuse(&args).unwrap();
    }

    cmd_evaluate(&EvaluateArgs::Files {
        gt: fixture("gt.json"),
        pred: fixture("pred.json"),
        label: "F1 + RAG".into(),
        out: Some(p("report.json")),
        metrics: MetricConfig::default(),
        parallelism: 4,
    })
    .unwrap();
    let table = ltp_core::eval_harness::cmd_report(&[p("report.json")]).unwrap();
    std::fs::write(p("report.md"), table).unwrap();
}

const ATTRIBUTES: [&str; 4] = ["red", "green", "go_straight", "turn_left"];

fn random_pairs<R: Rng>(rng: &mut R, n_from: usize, n_to: usize, allow_self: bool) -> Vec<ScoredPair> {
    let mut pairs = Vec::new();
    for from in 0..n_from {
        for to in 0..n_to {
            if (allow_self || from != to) && rng.gen_bool(0.3) {
                pairs.push(ScoredPair {
                    from,
                    to,
                    confidence: rng.gen_range(0.05..=1.0),
                });
            }
        }
    }
    pairs
}

pub fn random_topology<R: Rng>(rng: &mut R) -> TopologySet {
    let lanes: Vec<LaneCenterline> = (0..rng.gen_range(0..7))
        .map(|_| {
            let n = rng.gen_range(2..8);
            let mut pt = [
                rng.gen_range(-50.0..50.0),
                rng.gen_range(-50.0..50.0),
                rng.gen_range(-1.0..1.0),
            ];
            let points = (0..n)
                .map(|_| {
                    let here = pt;
                    pt[0] += rng.gen_range(1.0..6.0);
                    pt[1] += rng.gen_range(-2.0..2.0);
                    here
                })
                .collect();
            LaneCenterline {
                points,
                confidence: rng.gen_range(0.05..=1.0),
            }
        })
        .collect();
    let elements: Vec<TrafficElement> = (0..rng.gen_range(0..5))
        .map(|_| {
            let x0 = rng.gen_range(0.0..1800.0);
            let y0 = rng.gen_range(0.0..1000.0);
            TrafficElement {
                bbox: [x0, y0, x0 + rng.gen_range(5.0..80.0), y0 + rng.gen_range(5.0..80.0)],
                attribute: ATTRIBUTES[rng.gen_range(0..ATTRIBUTES.len())].to_string(),
                confidence: rng.gen_range(0.05..=1.0),
            }
        })
        .collect();
    TopologySet {
        lane_adjacency: random_pairs(rng, lanes.len(), lanes.len(), false),
        lane_te_assoc: random_pairs(rng, lanes.len(), elements.len(), true),
        lanes,
        elements,
    }
}

pub fn random_scenario<R: Rng>(rng: &mut R) -> ScenarioFile {
    let frames = (0..rng.gen_range(1..5))
        .map(|i| Frame {
            frame_id: format!("{i:03}"),
            ego_pose: EgoPose {
                x: rng.gen_range(-100.0..100.0),
                y: rng.gen_range(-100.0..100.0),
                yaw: rng.gen_range(-3.1..3.1),
            },
            topology: random_topology(rng),
        })
        .collect();
    ScenarioFile {
        city: "detroit".into(),
        frames,
    }
}
