use ndarray::{Array1, Array2, ArrayView1};

use super::{check_dim, FusionError, FusionParams, PolylineEmbedding};
use crate::text_embed::EmbeddingVector;

/// Gradients of the squared error `‖G + λ·MLP(t) − target‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionGradients {
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
    pub lambda: f64,
}

impl FusionGradients {
    pub fn zeros_like(params: &FusionParams) -> Self {
        let m = &params.mlp;
        Self {
            w1: Array2::zeros(m.w1.raw_dim()),
            b1: Array1::zeros(m.b1.raw_dim()),
            w2: Array2::zeros(m.w2.raw_dim()),
            b2: Array1::zeros(m.b2.raw_dim()),
            lambda: 0.0,
        }
    }

    pub(crate) fn add_scaled(&mut self, other: &Self, scale: f64) {
        self.w1.scaled_add(scale, &other.w1);
        self.b1.scaled_add(scale, &other.b1);
        self.w2.scaled_add(scale, &other.w2);
        self.b2.scaled_add(scale, &other.b2);
        self.lambda += scale * other.lambda;
    }
}

/// `‖G + λ·MLP(t) − target‖²` for one sample.
pub fn squared_error(
    params: &FusionParams,
    graph: &PolylineEmbedding,
    text: &EmbeddingVector,
    target: &[f64],
) -> Result<f64, FusionError> {
    let e = super::fuse_weighted(graph, text, params)?;
    check_dim("target", e.len(), target.len())?;
    Ok(e.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum())
}

/// Backpropagated gradients of [`squared_error`] with respect to every MLP
/// parameter and `λ`.
pub fn fusion_gradients(
    params: &FusionParams,
    graph: &PolylineEmbedding,
    text: &EmbeddingVector,
    target: &[f64],
) -> Result<FusionGradients, FusionError> {
    let mlp = &params.mlp;
    check_dim("MLP input", mlp.d_text(), text.dim())?;
    check_dim("map embedding", mlp.d_map(), graph.dim())?;
    check_dim("target", mlp.d_map(), target.len())?;

    let t = ArrayView1::from(text.values());
    let (hidden, m) = mlp.forward_parts(t);
    let lambda = params.lambda;
    let e = ArrayView1::from(graph.values()).to_owned() + &(lambda * &m);
    let residual = 2.0 * (e - ArrayView1::from(target));

    let d_lambda = residual.dot(&m);
    let d_out = lambda * &residual;
    let d_w2 = outer(&d_out, &hidden);
    let d_hidden = mlp.w2.t().dot(&d_out);
    let d_pre = d_hidden * hidden.mapv(|h| 1.0 - h * h);
    let d_w1 = outer(&d_pre, &t.to_owned());

    Ok(FusionGradients {
        w1: d_w1,
        b1: d_pre,
        w2: d_w2,
        b2: d_out,
        lambda: d_lambda,
    })
}

fn outer(a: &Array1<f64>, b: &Array1<f64>) -> Array2<f64> {
    let col = a.view().insert_axis(ndarray::Axis(1));
    let row = b.view().insert_axis(ndarray::Axis(0));
    col.dot(&row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prior_fusion::fuse_weighted;
    use rand::{Rng, SeedableRng};

    fn instance(seed: u64) -> (FusionParams, PolylineEmbedding, EmbeddingVector, Vec<f64>) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xfeed);
        let mut p = FusionParams::seeded(6, 4, 5, seed).unwrap();
        p.lambda = rng.gen_range(-2.0..2.0);
        let g = PolylineEmbedding((0..5).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let t = EmbeddingVector::new((0..6).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let y = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        (p, g, t, y)
    }

    #[test]
    fn zero_at_exact_fit() {
        let (p, g, t, _) = instance(1);
        let target = fuse_weighted(&g, &t, &p).unwrap();
        let grads = fusion_gradients(&p, &g, &t, &target).unwrap();
        assert_eq!(grads, FusionGradients::zeros_like(&p));
    }

    #[test]
    fn lambda_gradient_closed_form() {
        let (p, g, t, y) = instance(2);
        let e = fuse_weighted(&g, &t, &p).unwrap();
        let m = crate::prior_fusion::mlp_forward(&p.mlp, &t).unwrap();
        let expected: f64 = e.iter().zip(&y).zip(&m).map(|((e, y), m)| 2.0 * (e - y) * m).sum();
        let got = fusion_gradients(&p, &g, &t, &y).unwrap().lambda;
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn finite_difference_spot_check() {
        let (p, g, t, y) = instance(3);
        let grads = fusion_gradients(&p, &g, &t, &y).unwrap();
        let h = 1e-5;
        let mut plus = p.clone();
        plus.mlp.w1[[2, 3]] += h;
        let mut minus = p.clone();
        minus.mlp.w1[[2, 3]] -= h;
        let fd = (squared_error(&plus, &g, &t, &y).unwrap() - squared_error(&minus, &g, &t, &y).unwrap()) / (2.0 * h);
        assert!((fd - grads.w1[[2, 3]]).abs() <= 1e-4 * fd.abs().max(grads.w1[[2, 3]].abs()));
    }

    #[test]
    fn dimension_errors() {
        let (p, g, t, _) = instance(4);
        assert!(fusion_gradients(&p, &g, &t, &[0.0; 3]).is_err());
        assert!(squared_error(&p, &g, &t, &[0.0; 3]).is_err());
    }
}
