//! Lane-topology evaluation.
//!
//! - `DET_l`: lane-centerline AP under discrete Fréchet matching, averaged over
//!   several distance thresholds.
//! - `DET_t`: traffic-element AP under IoU matching, averaged over attribute classes.
//! - `TOP_ll` / `TOP_lt`: AP of predicted lane–lane edges and lane–element
//!   associations, judged through the instance matchings.
//! - `OLS`: `(DET_l + DET_t + √TOP_ll + √TOP_lt) / 4`.

mod ap;
mod detection;
mod evaluate;
mod frechet;
mod matching;
mod ols;
mod topology;
mod types;

pub use ap::average_precision;
pub use detection::{det_l, det_l_per_threshold, det_t};
pub use evaluate::{evaluate_frame, evaluate_frames, FrameMetrics, MetricConfig, MetricReport};
pub use frechet::{discrete_frechet, hausdorff};
pub use matching::{iou, match_elements, match_lanes, match_lanes_with, Matching};
pub use ols::ols;
pub use topology::{pair_ap, top_ll, top_lt};
pub use types::{LaneCenterline, Point3, ScoredPair, TopologySet, TrafficElement};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricError {
    #[error("metric value {name}={value} outside [0, 1]")]
    Domain { name: &'static str, value: f64 },
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("invalid metric configuration: {0}")]
    Config(String),
}
