use super::Point3;

fn dist(a: &Point3, b: &Point3) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Discrete Fréchet distance (Euclidean point metric), by dynamic programming
/// over the coupling lattice with a single rolling row. Returns `f64::INFINITY`
/// when either polyline is empty.
pub fn discrete_frechet(a: &[Point3], b: &[Point3]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let mut row = vec![0.0f64; b.len()];
    for (i, pa) in a.iter().enumerate() {
        let mut diag = 0.0;
        for (j, pb) in b.iter().enumerate() {
            let d = dist(pa, pb);
            let prev_up = row[j];
            row[j] = match (i, j) {
                (0, 0) => d,
                (0, _) => row[j - 1].max(d),
                (_, 0) => prev_up.max(d),
                _ => prev_up.min(diag).min(row[j - 1]).max(d),
            };
            diag = prev_up;
        }
    }
    row[b.len() - 1]
}

/// Symmetric Hausdorff distance between the vertex sets.
pub fn hausdorff(a: &[Point3], b: &[Point3]) -> f64 {
    let directed = |x: &[Point3], y: &[Point3]| {
        x.iter()
            .map(|p| y.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}
