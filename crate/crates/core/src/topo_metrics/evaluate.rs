use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{det_l_per_threshold, det_t, match_elements, match_lanes, ols, top_ll, top_lt, MetricError, TopologySet};

/// Matching thresholds. Defaults: Fréchet {1.0, 1.5, 2.0, 3.0} m, topology
/// lane matching at 2.0 m, traffic-element IoU 0.75.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricConfig {
    pub frechet_thresholds: Vec<f64>,
    pub topology_threshold: f64,
    pub element_iou: f64,
    /// Allowed traffic-element attributes; anything goes when absent.
    pub attribute_vocabulary: Option<Vec<String>>,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            frechet_thresholds: vec![1.0, 1.5, 2.0, 3.0],
            topology_threshold: 2.0,
            element_iou: 0.75,
            attribute_vocabulary: None,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<(), MetricError> {
        let positive = |t: f64| t > 0.0;
        if self.frechet_thresholds.is_empty() || !self.frechet_thresholds.iter().all(|&t| positive(t)) {
            return Err(MetricError::Config(
                "Fréchet thresholds must be a non-empty list of positive values".into(),
            ));
        }
        if !positive(self.topology_threshold) {
            return Err(MetricError::Config("topology threshold must be positive".into()));
        }
        if !(positive(self.element_iou) && self.element_iou <= 1.0) {
            return Err(MetricError::Config("element IoU threshold must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Metrics and matching diagnostics of one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameMetrics {
    pub frame_id: String,
    pub det_l: f64,
    pub det_l_per_threshold: Vec<f64>,
    pub det_t: f64,
    pub top_ll: f64,
    pub top_lt: f64,
    /// Prediction → ground-truth lane at the topology threshold.
    pub lane_matches: Vec<Option<usize>>,
    /// Prediction → ground-truth traffic element.
    pub element_matches: Vec<Option<usize>>,
    pub lane_false_negatives: usize,
    pub element_false_negatives: usize,
}

pub fn evaluate_frame(
    frame_id: &str,
    pred: &TopologySet,
    gt: &TopologySet,
    config: &MetricConfig,
) -> Result<FrameMetrics, MetricError> {
    config.validate()?;
    let vocab = config.attribute_vocabulary.as_deref();
    pred.validate(vocab)?;
    gt.validate(vocab)?;
    let per_threshold = det_l_per_threshold(pred, gt, &config.frechet_thresholds);
    let lanes = match_lanes(&pred.lanes, &gt.lanes, config.topology_threshold);
    let elements = match_elements(&pred.elements, &gt.elements, config.element_iou);
    Ok(FrameMetrics {
        frame_id: frame_id.to_string(),
        det_l: per_threshold.iter().sum::<f64>() / per_threshold.len() as f64,
        det_l_per_threshold: per_threshold,
        det_t: det_t(pred, gt, config.element_iou),
        top_ll: top_ll(pred, gt, &lanes),
        top_lt: top_lt(pred, gt, &lanes, &elements),
        lane_false_negatives: lanes.false_negatives(),
        element_false_negatives: elements.false_negatives(),
        lane_matches: lanes.pred_to_gt,
        element_matches: elements.pred_to_gt,
    })
}

/// Evaluates `(frame_id, prediction, ground truth)` triples in parallel; output
/// keeps input order.
pub fn evaluate_frames(
    frames: &[(String, &TopologySet, &TopologySet)],
    config: &MetricConfig,
) -> Result<Vec<FrameMetrics>, MetricError> {
    frames
        .par_iter()
        .map(|(id, pred, gt)| evaluate_frame(id, pred, gt, config))
        .collect()
}

/// One labeled row of results. `ols` is always derived from the four stored
/// metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub label: String,
    /// Training schedule tag (`F0`, `F1`, `NF`) parsed from the label, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<String>,
    pub det_l: f64,
    pub det_t: f64,
    pub top_ll: f64,
    pub top_lt: f64,
    pub ols: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frames: Vec<FrameMetrics>,
}

fn schedule_of(label: &str) -> Option<String> {
    let head = label.split(|c: char| c.is_whitespace() || c == '+').next()?;
    ["F0", "F1", "NF"]
        .iter()
        .find(|s| s.eq_ignore_ascii_case(head))
        .map(|s| s.to_string())
}

impl MetricReport {
    pub fn from_values(label: &str, det_l: f64, det_t: f64, top_ll: f64, top_lt: f64) -> Result<Self, MetricError> {
        Ok(Self {
            label: label.to_string(),
            schedule: schedule_of(label),
            det_l,
            det_t,
            top_ll,
            top_lt,
            ols: ols(det_l, det_t, top_ll, top_lt)?,
            frames: Vec::new(),
        })
    }

    /// Unweighted mean of each metric over frames; OLS from the means.
    pub fn from_frames(label: &str, frames: Vec<FrameMetrics>) -> Result<Self, MetricError> {
        if frames.is_empty() {
            return Err(MetricError::Config("no frames to aggregate".into()));
        }
        let n = frames.len() as f64;
        let mean = |f: fn(&FrameMetrics) -> f64| frames.iter().map(f).sum::<f64>() / n;
        let mut report = Self::from_values(
            label,
            mean(|f| f.det_l),
            mean(|f| f.det_t),
            mean(|f| f.top_ll),
            mean(|f| f.top_lt),
        )?;
        report.frames = frames;
        Ok(report)
    }

    /// Recomputes OLS and checks it against the stored value.
    pub fn check_consistency(&self) -> Result<(), MetricError> {
        let expected = ols(self.det_l, self.det_t, self.top_ll, self.top_lt)?;
        if (expected - self.ols).abs() > 1e-12 {
            return Err(MetricError::Domain {
                name: "ols",
                value: self.ols,
            });
        }
        Ok(())
    }

    pub fn values(&self) -> [f64; 5] {
        [self.det_l, self.det_t, self.top_ll, self.top_lt, self.ols]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topo_metrics::{LaneCenterline, TrafficElement};

    fn scene() -> TopologySet {
        TopologySet {
            lanes: vec![
                LaneCenterline {
                    points: vec![[0.0, 0.0, 0.0], [10.0, 0.0, 0.0]],
                    confidence: 1.0,
                },
                LaneCenterline {
                    points: vec![[10.0, 0.0, 0.0], [20.0, 0.0, 0.0]],
                    confidence: 1.0,
                },
            ],
            elements: vec![TrafficElement {
                bbox: [0.0, 0.0, 4.0, 8.0],
                attribute: "red".into(),
                confidence: 1.0,
            }],
            lane_adjacency: vec![(0, 1, 1.0).into()],
            lane_te_assoc: vec![(1, 0, 1.0).into()],
        }
    }

    #[test]
    fn perfect_frame() {
        let m = evaluate_frame("f0", &scene(), &scene(), &MetricConfig::default()).unwrap();
        assert_eq!([m.det_l, m.det_t, m.top_ll, m.top_lt], [1.0; 4]);
        let r = MetricReport::from_frames("NF + λ", vec![m]).unwrap();
        assert_eq!(r.values(), [1.0; 5]);
        assert_eq!(r.schedule.as_deref(), Some("NF"));
        r.check_consistency().unwrap();
    }

    #[test]
    fn empty_prediction_frame_and_mean() {
        let cfg = MetricConfig::default();
        let perfect = evaluate_frame("a", &scene(), &scene(), &cfg).unwrap();
        let empty = evaluate_frame("b", &TopologySet::default(), &scene(), &cfg).unwrap();
        assert_eq!([empty.det_l, empty.det_t, empty.top_ll, empty.top_lt], [0.0; 4]);
        assert_eq!(empty.lane_false_negatives, 2);
        let r = MetricReport::from_frames("x", vec![perfect, empty]).unwrap();
        assert_eq!([r.det_l, r.det_t, r.top_ll, r.top_lt], [0.5; 4]);
        assert!((r.ols - (1.0 + 2.0 * 0.5f64.sqrt()) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        let cfg = MetricConfig {
            frechet_thresholds: vec![],
            ..Default::default()
        };
        assert!(evaluate_frame("a", &scene(), &scene(), &cfg).is_err());
        let mut bad = scene();
        bad.lane_adjacency.push((0, 7, 1.0).into());
        assert!(evaluate_frame("a", &bad, &scene(), &MetricConfig::default()).is_err());
        assert!(MetricReport::from_frames("x", vec![]).is_err());
    }

    #[test]
    fn schedule_labels() {
        assert_eq!(schedule_of("F0 + RAG").as_deref(), Some("F0"));
        assert_eq!(schedule_of("F1+λ").as_deref(), Some("F1"));
        assert_eq!(schedule_of("SMERF"), None);
    }

    #[test]
    fn tampered_ols_detected() {
        let mut r = MetricReport::from_values("x", 0.5, 0.5, 0.25, 0.25).unwrap();
        assert_eq!(r.ols, 0.5);
        r.ols = 0.6;
        assert!(r.check_consistency().is_err());
    }
}
