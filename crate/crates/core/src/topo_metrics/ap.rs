/// All-point interpolated average precision.
///
/// `decisions` are true/false positives already ranked by descending
/// confidence. The precision credited at each true positive is the maximum
/// precision at any rank at or below it. With no ground truth, AP is 1 for an
/// empty prediction list and 0 otherwise.
pub fn average_precision(decisions: &[bool], n_gt: usize) -> f64 {
    if n_gt == 0 {
        return if decisions.is_empty() { 1.0 } else { 0.0 };
    }
    let mut tp = 0usize;
    let precisions: Vec<f64> = decisions
        .iter()
        .enumerate()
        .map(|(rank, &hit)| {
            tp += usize::from(hit);
            tp as f64 / (rank + 1) as f64
        })
        .collect();
    let mut best = 0.0f64;
    let mut credited = 0.0f64;
    for (p, &hit) in precisions.iter().zip(decisions).rev() {
        best = best.max(*p);
        if hit {
            credited += best;
        }
    }
    (credited / n_gt as f64).min(1.0)
}
