use ndarray::{Array1, Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_dim, FusionError};
use crate::text_embed::EmbeddingVector;

/// Two-layer projection `W2·tanh(W1·t + b1) + b2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    /// `hidden × d_text`
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    /// `d_map × hidden`
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
}

impl MlpParams {
    pub fn zeros(d_text: usize, hidden: usize, d_map: usize) -> Self {
        Self {
            w1: Array2::zeros((hidden, d_text)),
            b1: Array1::zeros(hidden),
            w2: Array2::zeros((d_map, hidden)),
            b2: Array1::zeros(d_map),
        }
    }

    /// Each layer drawn from `U(-1/√fan_in, 1/√fan_in)`, values rounded to
    /// `f32` precision so a saved parameter file reloads bit-exactly.
    pub fn seeded(d_text: usize, hidden: usize, d_map: usize, seed: u64) -> Result<Self, FusionError> {
        if d_text == 0 || hidden == 0 || d_map == 0 {
            return Err(FusionError::Config(format!(
                "MLP dimensions must be positive (d_text={d_text}, hidden={hidden}, d_map={d_map})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |fan_in: usize| {
            let bound = 1.0 / (fan_in as f64).sqrt();
            f64::from(rng.gen_range(-bound..bound) as f32)
        };
        let w1 = Array2::from_shape_simple_fn((hidden, d_text), || draw(d_text));
        let b1 = Array1::from_shape_simple_fn(hidden, || draw(d_text));
        let w2 = Array2::from_shape_simple_fn((d_map, hidden), || draw(hidden));
        let b2 = Array1::from_shape_simple_fn(d_map, || draw(hidden));
        Ok(Self { w1, b1, w2, b2 })
    }

    pub fn d_text(&self) -> usize {
        self.w1.ncols()
    }

    pub fn hidden(&self) -> usize {
        self.w1.nrows()
    }

    pub fn d_map(&self) -> usize {
        self.w2.nrows()
    }

    pub fn validate(&self) -> Result<(), FusionError> {
        check_dim("b1", self.hidden(), self.b1.len())?;
        check_dim("W2 columns", self.hidden(), self.w2.ncols())?;
        check_dim("b2", self.d_map(), self.b2.len())?;
        let finite = self
            .w1
            .iter()
            .chain(&self.b1)
            .chain(&self.w2)
            .chain(&self.b2)
            .all(|v| v.is_finite());
        if !finite {
            return Err(FusionError::Config("MLP parameters must be finite".into()));
        }
        Ok(())
    }

    /// Hidden activations and output for one input.
    pub(crate) fn forward_parts(&self, t: ArrayView1<'_, f64>) -> (Array1<f64>, Array1<f64>) {
        let hidden = (self.w1.dot(&t) + &self.b1).mapv(f64::tanh);
        let out = self.w2.dot(&hidden) + &self.b2;
        (hidden, out)
    }
}

/// MLP parameters plus the scalar fusion weight.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionParams {
    pub mlp: MlpParams,
    pub lambda: f64,
}

impl FusionParams {
    /// Seeded MLP with `λ = 1`, so weighted fusion starts equal to additive fusion.
    pub fn seeded(d_text: usize, hidden: usize, d_map: usize, seed: u64) -> Result<Self, FusionError> {
        Ok(Self {
            mlp: MlpParams::seeded(d_text, hidden, d_map, seed)?,
            lambda: 1.0,
        })
    }
}

pub fn mlp_forward(params: &MlpParams, t: &EmbeddingVector) -> Result<Vec<f64>, FusionError> {
    check_dim("MLP input", params.d_text(), t.dim())?;
    let (_, out) = params.forward_parts(ArrayView1::from(t.values()));
    Ok(out.to_vec())
}
