use super::FusionError;

const EARTH_RADIUS_M: f64 = 6_371_008.8;

/// Stand-in for a learned map encoder: fixed sinusoidal features of each
/// vertex, mean-pooled. Not a reproduction of any trained encoder.
#[derive(Debug, Clone, PartialEq)]
pub struct PolylineEmbedding(pub Vec<f64>);

impl PolylineEmbedding {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Equirectangular projection of `(lon, lat)` degrees to meters east/north of `origin`.
pub fn project_to_local(polyline: &[(f64, f64)], origin: (f64, f64)) -> Vec<(f64, f64)> {
    let (lon0, lat0) = origin;
    let k = lat0.to_radians().cos();
    polyline
        .iter()
        .map(|&(lon, lat)| {
            (
                EARTH_RADIUS_M * (lon - lon0).to_radians() * k,
                EARTH_RADIUS_M * (lat - lat0).to_radians(),
            )
        })
        .collect()
}

/// Each vertex `(x, y)` yields `d_map` features: for pair `i` in `0..d_map/2`
/// with frequency `ω_i = 10000^(-2i/d_map)` and coordinate `c = x` for even `i`,
/// `c = y` for odd `i`, features `2i, 2i+1` are `sin(ω_i c), cos(ω_i c)`.
/// Vertex features are averaged.
pub fn graph_embed_polyline(polyline: &[(f64, f64)], d_map: usize) -> Result<PolylineEmbedding, FusionError> {
    if d_map == 0 || !d_map.is_multiple_of(2) {
        return Err(FusionError::InvalidMapDimension(d_map));
    }
    let mut distinct = polyline.to_vec();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(FusionError::DegeneratePolyline(distinct.len()));
    }
    let freqs: Vec<f64> = (0..d_map / 2)
        .map(|i| 10000f64.powf(-2.0 * i as f64 / d_map as f64))
        .collect();
    let mut acc = vec![0.0; d_map];
    for &(x, y) in polyline {
        for (i, w) in freqs.iter().enumerate() {
            let c = if i % 2 == 0 { x } else { y };
            acc[2 * i] += (w * c).sin();
            acc[2 * i + 1] += (w * c).cos();
        }
    }
    let n = polyline.len() as f64;
    Ok(PolylineEmbedding(acc.into_iter().map(|v| v / n).collect()))
}
