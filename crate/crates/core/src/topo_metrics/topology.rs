use std::collections::HashSet;

use super::matching::rank_by_confidence;
use super::{average_precision, Matching, ScoredPair, TopologySet};

/// AP of predicted pairs: a pair is a hit when both endpoints are matched and
/// the mapped pair exists in the ground truth (each ground-truth pair counted
/// once). Every ground-truth pair contributes to recall.
pub fn pair_ap(pred: &[ScoredPair], gt: &[ScoredPair], from_map: &Matching, to_map: &Matching) -> f64 {
    let gt_pairs: HashSet<(usize, usize)> = gt.iter().map(|p| (p.from, p.to)).collect();
    let mut claimed = HashSet::new();
    let decisions: Vec<bool> = rank_by_confidence(pred.iter().map(|p| p.confidence))
        .into_iter()
        .map(|k| {
            let p = &pred[k];
            match (from_map.pred_to_gt[p.from], to_map.pred_to_gt[p.to]) {
                (Some(a), Some(b)) => gt_pairs.contains(&(a, b)) && claimed.insert((a, b)),
                _ => false,
            }
        })
        .collect();
    average_precision(&decisions, gt_pairs.len())
}

/// Lane–lane connectivity score, given the lane matching.
pub fn top_ll(pred: &TopologySet, gt: &TopologySet, lanes: &Matching) -> f64 {
    pair_ap(&pred.lane_adjacency, &gt.lane_adjacency, lanes, lanes)
}

/// Lane–traffic-element association score, given both matchings.
pub fn top_lt(pred: &TopologySet, gt: &TopologySet, lanes: &Matching, elements: &Matching) -> f64 {
    pair_ap(&pred.lane_te_assoc, &gt.lane_te_assoc, lanes, elements)
}
