use super::MetricError;

/// `(det_l + det_t + √top_ll + √top_lt) / 4`; every input must lie in `[0, 1]`.
pub fn ols(det_l: f64, det_t: f64, top_ll: f64, top_lt: f64) -> Result<f64, MetricError> {
    for (name, value) in [
        ("det_l", det_l),
        ("det_t", det_t),
        ("top_ll", top_ll),
        ("top_lt", top_lt),
    ] {
        if !(0.0..=1.0).contains(&value) {
            return Err(MetricError::Domain { name, value });
        }
    }
    Ok((det_l + det_t + top_ll.sqrt() + top_lt.sqrt()) / 4.0)
}
