use super::{discrete_frechet, LaneCenterline, TrafficElement};

/// One-to-one assignment of predictions to ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// Ground-truth index matched to each prediction.
    pub pred_to_gt: Vec<Option<usize>>,
    /// Prediction indices by descending confidence, ties by ascending index.
    pub ranked: Vec<usize>,
    pub n_gt: usize,
}

impl Matching {
    /// True/false positive flags in rank order.
    pub fn decisions(&self) -> Vec<bool> {
        self.ranked.iter().map(|&p| self.pred_to_gt[p].is_some()).collect()
    }

    pub fn true_positives(&self) -> usize {
        self.pred_to_gt.iter().filter(|m| m.is_some()).count()
    }

    pub fn false_positives(&self) -> usize {
        self.pred_to_gt.len() - self.true_positives()
    }

    pub fn false_negatives(&self) -> usize {
        self.n_gt - self.true_positives()
    }
}

pub(crate) fn rank_by_confidence(confidences: impl Iterator<Item = f64>) -> Vec<usize> {
    let conf: Vec<f64> = confidences.collect();
    let mut order: Vec<usize> = (0..conf.len()).collect();
    order.sort_by(|&a, &b| conf[b].total_cmp(&conf[a]).then(a.cmp(&b)));
    order
}

/// Greedy matching on a precomputed `pred × gt` distance table: in rank order,
/// each prediction takes the nearest unmatched ground truth within `threshold`
/// (ties to the lower index).
pub fn match_lanes_with(distances: &[Vec<f64>], ranked: &[usize], n_gt: usize, threshold: f64) -> Matching {
    let mut taken = vec![false; n_gt];
    let mut pred_to_gt = vec![None; distances.len()];
    for &p in ranked {
        let best = (0..n_gt)
            .filter(|&g| !taken[g] && distances[p][g] <= threshold)
            .min_by(|&a, &b| distances[p][a].total_cmp(&distances[p][b]).then(a.cmp(&b)));
        if let Some(g) = best {
            taken[g] = true;
            pred_to_gt[p] = Some(g);
        }
    }
    Matching {
        pred_to_gt,
        ranked: ranked.to_vec(),
        n_gt,
    }
}

pub(crate) fn frechet_table(preds: &[LaneCenterline], gts: &[LaneCenterline]) -> Vec<Vec<f64>> {
    preds
        .iter()
        .map(|p| gts.iter().map(|g| discrete_frechet(&p.points, &g.points)).collect())
        .collect()
}

/// Confidence-ordered greedy lane matching under discrete Fréchet distance.
pub fn match_lanes(preds: &[LaneCenterline], gts: &[LaneCenterline], threshold: f64) -> Matching {
    let ranked = rank_by_confidence(preds.iter().map(|l| l.confidence));
    match_lanes_with(&frechet_table(preds, gts), &ranked, gts.len(), threshold)
}

/// Intersection over union of two `(x_min, y_min, x_max, y_max)` boxes.
pub fn iou(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let w = (a[2].min(b[2]) - a[0].max(b[0])).max(0.0);
    let h = (a[3].min(b[3]) - a[1].max(b[1])).max(0.0);
    let inter = w * h;
    let area = |r: &[f64; 4]| (r[2] - r[0]) * (r[3] - r[1]);
    let union = area(a) + area(b) - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// Class-aware greedy matching: a prediction may only take an unmatched
/// ground truth with the same attribute and IoU ≥ `min_iou`, preferring the
/// highest IoU.
pub fn match_elements(preds: &[TrafficElement], gts: &[TrafficElement], min_iou: f64) -> Matching {
    let ranked = rank_by_confidence(preds.iter().map(|e| e.confidence));
    let mut taken = vec![false; gts.len()];
    let mut pred_to_gt = vec![None; preds.len()];
    for &p in &ranked {
        let best = gts
            .iter()
            .enumerate()
            .filter(|(g, gt)| !taken[*g] && gt.attribute == preds[p].attribute)
            .map(|(g, gt)| (g, iou(&preds[p].bbox, &gt.bbox)))
            .filter(|&(_, v)| v >= min_iou)
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        if let Some((g, _)) = best {
            taken[g] = true;
            pred_to_gt[p] = Some(g);
        }
    }
    Matching {
        pred_to_gt,
        ranked,
        n_gt: gts.len(),
    }
}
