use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::MetricError;

pub type Point3 = [f64; 3];

fn one() -> f64 {
    1.0
}

/// Ego-frame 3D centerline in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaneCenterline {
    pub points: Vec<Point3>,
    #[serde(default = "one")]
    pub confidence: f64,
}

/// Image-space detection `(x_min, y_min, x_max, y_max)` with an attribute class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficElement {
    pub bbox: [f64; 4],
    pub attribute: String,
    #[serde(default = "one")]
    pub confidence: f64,
}

/// Directed index pair with a confidence; serialized as `[from, to, confidence]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, f64)", into = "(usize, usize, f64)")]
pub struct ScoredPair {
    pub from: usize,
    pub to: usize,
    pub confidence: f64,
}

impl From<(usize, usize, f64)> for ScoredPair {
    fn from((from, to, confidence): (usize, usize, f64)) -> Self {
        Self { from, to, confidence }
    }
}

impl From<ScoredPair> for (usize, usize, f64) {
    fn from(p: ScoredPair) -> Self {
        (p.from, p.to, p.confidence)
    }
}

/// Lanes, traffic elements, lane→lane edges and lane→element associations of
/// one frame, either ground truth or prediction.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TopologySet {
    #[serde(default)]
    pub lanes: Vec<LaneCenterline>,
    #[serde(default, rename = "traffic_elements")]
    pub elements: Vec<TrafficElement>,
    #[serde(default)]
    pub lane_adjacency: Vec<ScoredPair>,
    #[serde(default, rename = "lane_te")]
    pub lane_te_assoc: Vec<ScoredPair>,
}

fn check_confidence(what: &str, idx: usize, c: f64) -> Result<(), MetricError> {
    if !(0.0..=1.0).contains(&c) {
        return Err(MetricError::InvalidTopology(format!(
            "{what} {idx} confidence {c} outside [0, 1]"
        )));
    }
    Ok(())
}

impl TopologySet {
    /// Checks the structural invariants. `vocabulary`, when given, restricts
    /// traffic-element attributes.
    pub fn validate(&self, vocabulary: Option<&[String]>) -> Result<(), MetricError> {
        let bad = |m: String| Err(MetricError::InvalidTopology(m));
        for (i, lane) in self.lanes.iter().enumerate() {
            if lane.points.len() < 2 {
                return bad(format!("lane {i} has {} point(s), need at least 2", lane.points.len()));
            }
            if lane.points.iter().flatten().any(|v| !v.is_finite()) {
                return bad(format!("lane {i} has non-finite coordinates"));
            }
            check_confidence("lane", i, lane.confidence)?;
        }
        for (i, te) in self.elements.iter().enumerate() {
            let [x0, y0, x1, y1] = te.bbox;
            if !(x0 < x1 && y0 < y1) {
                return bad(format!("traffic element {i} has an empty or inverted bbox"));
            }
            if let Some(vocab) = vocabulary {
                if !vocab.contains(&te.attribute) {
                    return bad(format!(
                        "traffic element {i} attribute {:?} not in vocabulary",
                        te.attribute
                    ));
                }
            }
            check_confidence("traffic element", i, te.confidence)?;
        }
        let check_pairs = |name: &str, pairs: &[ScoredPair], n_to: usize| -> Result<(), MetricError> {
            let mut seen = HashSet::new();
            for (k, p) in pairs.iter().enumerate() {
                if p.from >= self.lanes.len() || p.to >= n_to {
                    return Err(MetricError::InvalidTopology(format!(
                        "{name} pair {k} ({}, {}) out of range",
                        p.from, p.to
                    )));
                }
                if !seen.insert((p.from, p.to)) {
                    return Err(MetricError::InvalidTopology(format!(
                        "{name} pair ({}, {}) duplicated",
                        p.from, p.to
                    )));
                }
                check_confidence(name, k, p.confidence)?;
            }
            Ok(())
        };
        check_pairs("lane_adjacency", &self.lane_adjacency, self.lanes.len())?;
        check_pairs("lane_te", &self.lane_te_assoc, self.elements.len())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lane(points: Vec<Point3>) -> LaneCenterline {
        LaneCenterline {
            points,
            confidence: 1.0,
        }
    }

    #[test]
    fn json_shape() {
        let json = r#"{
          "lanes": [{"points": [[0,0,0],[1,0,0]]}, {"points": [[1,0,0],[2,0,0]], "confidence": 0.5}],
          "traffic_elements": [{"bbox": [0,0,10,10], "attribute": "red"}],
          "lane_adjacency": [[0, 1, 0.9]],
          "lane_te": [[1, 0, 1.0]]
        }"#;
        let t: TopologySet = serde_json::from_str(json).unwrap();
        assert_eq!(t.lanes[0].confidence, 1.0);
        assert_eq!(
            t.lane_adjacency[0],
            ScoredPair {
                from: 0,
                to: 1,
                confidence: 0.9
            }
        );
        t.validate(None).unwrap();
        let back = serde_json::to_value(&t).unwrap();
        assert_eq!(back["lane_te"], serde_json::json!([[1, 0, 1.0]]));
    }

    #[test]
    fn invariant_violations() {
        let good = TopologySet {
            lanes: vec![lane(vec![[0.0; 3], [1.0, 0.0, 0.0]]); 2],
            elements: vec![TrafficElement {
                bbox: [0.0, 0.0, 1.0, 1.0],
                attribute: "a".into(),
                confidence: 1.0,
            }],
            ..Default::default()
        };
        good.validate(Some(&["a".to_string()])).unwrap();
        assert!(good.validate(Some(&["b".to_string()])).is_err());

        let mut t = good.clone();
        t.lanes[0].points.truncate(1);
        assert!(t.validate(None).is_err());
        let mut t = good.clone();
        t.elements[0].bbox = [1.0, 0.0, 1.0, 1.0];
        assert!(t.validate(None).is_err());
        let mut t = good.clone();
        t.lane_adjacency = vec![(0, 2, 1.0).into()];
        assert!(t.validate(None).is_err());
        let mut t = good.clone();
        t.lane_adjacency = vec![(0, 1, 1.0).into(), (0, 1, 0.5).into()];
        assert!(t.validate(None).is_err());
        let mut t = good.clone();
        t.lane_te_assoc = vec![(0, 1, 1.0).into()];
        assert!(t.validate(None).is_err());
        let mut t = good;
        t.lanes[1].confidence = 1.5;
        assert!(t.validate(None).is_err());
    }
}
