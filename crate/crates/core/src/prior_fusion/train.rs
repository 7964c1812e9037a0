use super::{fusion_gradients, squared_error, FusionError, FusionGradients, FusionParams, PolylineEmbedding};
use crate::text_embed::EmbeddingVector;

/// One training example: polyline embedding, text embedding, target fused embedding.
#[derive(Debug, Clone)]
pub struct Sample {
    pub graph: PolylineEmbedding,
    pub text: EmbeddingVector,
    pub target: Vec<f64>,
}

/// Which parameter groups receive updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trainable {
    pub mlp: bool,
    pub lambda: bool,
}

impl Trainable {
    pub const ALL: Self = Self {
        mlp: true,
        lambda: true,
    };
    pub const LAMBDA_ONLY: Self = Self {
        mlp: false,
        lambda: true,
    };
    pub const MLP_ONLY: Self = Self {
        mlp: true,
        lambda: false,
    };
}

#[derive(Debug, Clone, Copy)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub trainable: Trainable,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: FusionParams,
    /// Full-batch loss at the start of each epoch.
    pub losses: Vec<f64>,
    /// Loss after the last update.
    pub final_loss: f64,
}

/// Mean over samples of the per-sample squared error.
pub fn dataset_loss(params: &FusionParams, data: &[Sample]) -> Result<f64, FusionError> {
    let mut total = 0.0;
    for s in data {
        total += squared_error(params, &s.graph, &s.text, &s.target)?;
    }
    Ok(total / data.len() as f64)
}

/// Full-batch gradient descent on [`dataset_loss`].
pub fn train_fusion_toy(
    initial: FusionParams,
    data: &[Sample],
    config: TrainConfig,
) -> Result<TrainOutcome, FusionError> {
    if data.is_empty() {
        return Err(FusionError::Config("training set is empty".into()));
    }
    if !(config.learning_rate > 0.0 && config.learning_rate.is_finite()) {
        return Err(FusionError::Config(format!(
            "learning rate must be positive, got {}",
            config.learning_rate
        )));
    }
    let mut params = initial;
    let mut losses = Vec::with_capacity(config.epochs);
    let scale = 1.0 / data.len() as f64;
    for _ in 0..config.epochs {
        let mut grad = FusionGradients::zeros_like(&params);
        let mut loss = 0.0;
        for s in data {
            loss += squared_error(&params, &s.graph, &s.text, &s.target)?;
            grad.add_scaled(&fusion_gradients(&params, &s.graph, &s.text, &s.target)?, scale);
        }
        losses.push(loss * scale);
        let lr = config.learning_rate;
        if config.trainable.mlp {
            params.mlp.w1.scaled_add(-lr, &grad.w1);
            params.mlp.b1.scaled_add(-lr, &grad.b1);
            params.mlp.w2.scaled_add(-lr, &grad.w2);
            params.mlp.b2.scaled_add(-lr, &grad.b2);
        }
        if config.trainable.lambda {
            params.lambda -= lr * grad.lambda;
        }
    }
    let final_loss = dataset_loss(&params, data)?;
    Ok(TrainOutcome {
        params,
        losses,
        final_loss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prior_fusion::fuse_weighted;
    use rand::{Rng, SeedableRng};

    fn synthetic(n: usize, lambda_true: f64, seed: u64) -> (FusionParams, Vec<Sample>) {
        let mut truth = FusionParams::seeded(6, 4, 5, seed).unwrap();
        truth.lambda = lambda_true;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed + 100);
        let data = (0..n)
            .map(|_| {
                let graph = PolylineEmbedding((0..5).map(|_| rng.gen_range(-1.0..1.0)).collect());
                let text = EmbeddingVector::new((0..6).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
                let target = fuse_weighted(&graph, &text, &truth).unwrap();
                Sample { graph, text, target }
            })
            .collect();
        (truth, data)
    }

    #[test]
    fn zero_epochs_is_identity() {
        let (truth, data) = synthetic(4, 0.5, 1);
        let init = FusionParams::seeded(6, 4, 5, 77).unwrap();
        let out = train_fusion_toy(
            init.clone(),
            &data,
            TrainConfig {
                epochs: 0,
                learning_rate: 0.01,
                trainable: Trainable::ALL,
            },
        )
        .unwrap();
        assert_eq!(out.params, init);
        assert!(out.losses.is_empty());
        assert_ne!(out.params, truth);
    }

    #[test]
    fn lambda_recovery() {
        let (truth, data) = synthetic(32, 0.5, 2);
        let mut init = truth.clone();
        init.lambda = 1.0;
        let out = train_fusion_toy(
            init,
            &data,
            TrainConfig {
                epochs: 500,
                learning_rate: 0.01,
                trainable: Trainable::LAMBDA_ONLY,
            },
        )
        .unwrap();
        assert!((out.params.lambda - 0.5).abs() < 0.05, "λ = {}", out.params.lambda);
        assert_eq!(out.params.mlp, truth.mlp);
        assert!(out.final_loss < out.losses[0]);
    }

    #[test]
    fn overfits_single_sample() {
        let (_, data) = synthetic(1, 0.5, 3);
        let init = FusionParams::seeded(6, 4, 5, 99).unwrap();
        let out = train_fusion_toy(
            init,
            &data,
            TrainConfig {
                epochs: 3000,
                learning_rate: 0.01,
                trainable: Trainable::ALL,
            },
        )
        .unwrap();
        assert!(out.final_loss < 1e-6, "loss {}", out.final_loss);
        assert_eq!(out.losses.len(), 3000);
    }

    #[test]
    fn rejects_bad_config() {
        let (_, data) = synthetic(1, 0.5, 4);
        let init = FusionParams::seeded(6, 4, 5, 0).unwrap();
        let cfg = TrainConfig {
            epochs: 1,
            learning_rate: 0.0,
            trainable: Trainable::ALL,
        };
        assert!(train_fusion_toy(init.clone(), &data, cfg).is_err());
        let cfg = TrainConfig {
            learning_rate: 0.1,
            ..cfg
        };
        assert!(train_fusion_toy(init, &[], cfg).is_err());
    }
}
