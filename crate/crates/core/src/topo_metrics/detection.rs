use std::collections::BTreeSet;

use super::matching::{frechet_table, rank_by_confidence};
use super::{average_precision, match_elements, match_lanes_with, TopologySet};

/// Lane AP at each Fréchet threshold (meters).
pub fn det_l_per_threshold(pred: &TopologySet, gt: &TopologySet, thresholds: &[f64]) -> Vec<f64> {
    let table = frechet_table(&pred.lanes, &gt.lanes);
    let ranked = rank_by_confidence(pred.lanes.iter().map(|l| l.confidence));
    thresholds
        .iter()
        .map(|&t| {
            let m = match_lanes_with(&table, &ranked, gt.lanes.len(), t);
            average_precision(&m.decisions(), m.n_gt)
        })
        .collect()
}

/// Mean lane AP over the Fréchet thresholds.
pub fn det_l(pred: &TopologySet, gt: &TopologySet, thresholds: &[f64]) -> f64 {
    let aps = det_l_per_threshold(pred, gt, thresholds);
    aps.iter().sum::<f64>() / aps.len() as f64
}

/// Mean over attribute classes (union of predicted and ground-truth classes)
/// of traffic-element AP. 1 when neither set has elements.
pub fn det_t(pred: &TopologySet, gt: &TopologySet, min_iou: f64) -> f64 {
    let classes: BTreeSet<&str> = pred
        .elements
        .iter()
        .chain(&gt.elements)
        .map(|e| e.attribute.as_str())
        .collect();
    if classes.is_empty() {
        return 1.0;
    }
    let m = match_elements(&pred.elements, &gt.elements, min_iou);
    let total: f64 = classes
        .iter()
        .map(|&c| {
            let decisions: Vec<bool> = m
                .ranked
                .iter()
                .filter(|&&p| pred.elements[p].attribute == c)
                .map(|&p| m.pred_to_gt[p].is_some())
                .collect();
            let n_gt = gt.elements.iter().filter(|e| e.attribute == c).count();
            average_precision(&decisions, n_gt)
        })
        .sum();
    total / classes.len() as f64
}
