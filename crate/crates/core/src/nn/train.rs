//! Seeded mini-batch training loop.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::adam::AdamState;
use super::params::ParamSet;
use crate::error::{Error, Result};

/// Training hyperparameters. Defaults: learning rate 0.001, mini-batch 30,
/// 15 epochs, dropout 0.2, Adam.
#[derive(Debug, Clone)]
pub struct TrainHyperparams {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub dropout_rate: f64,
    pub seed: u64,
}

impl Default for TrainHyperparams {
    fn default() -> Self {
        Self { learning_rate: 0.001, batch_size: 30, epochs: 15, dropout_rate: 0.2, seed: 42 }
    }
}

impl TrainHyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 {
            return Err(Error::Config(format!("learning_rate must be > 0, got {}", self.learning_rate)));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be >= 1".to_string()));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::Config(format!("dropout_rate must be in [0, 1), got {}", self.dropout_rate)));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// A model that can compute mean loss and mean gradients over a batch.
/// The gradient container is a value of the model type itself.
pub trait GradModel: ParamSet + Clone {
    type Example;

    /// Mean loss over the batch and the gradient of that mean. Dropout masks
    /// are drawn from `rng` at `dropout_rate` (0 disables dropout).
    fn batch_gradients(
        &self,
        batch: &[&Self::Example],
        dropout_rate: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<(f64, Self)>;
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    /// Mean training loss per epoch (computed with dropout active, as seen
    /// by the optimizer).
    pub epoch_losses: Vec<f64>,
    /// Total Adam updates: epochs * ceil(n / batch_size).
    pub adam_steps: u64,
}

/// Trains in place. Each epoch shuffles the sample order with the seeded
/// rng and walks mini-batches of `hp.batch_size` (the last batch may be
/// short but is used). Deterministic given (model, examples, hp.seed).
pub fn train<M: GradModel>(model: &mut M, examples: &[M::Example], hp: &TrainHyperparams) -> Result<TrainReport> {
    hp.validate()?;
    if examples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut adam = AdamState::new(model);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut epoch_losses = Vec::with_capacity(hp.epochs);

    for _ in 0..hp.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(hp.batch_size) {
            let batch: Vec<&M::Example> = chunk.iter().map(|&i| &examples[i]).collect();
            let (loss, grads) = model.batch_gradients(&batch, hp.dropout_rate, &mut rng)?;
            grads.check_finite()?;
            adam.step(model, &grads, hp.learning_rate)?;
            loss_sum += loss * batch.len() as f64;
        }
        epoch_losses.push(loss_sum / examples.len() as f64);
    }
    Ok(TrainReport { epoch_losses, adam_steps: adam.step })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::dense::{Activation, DenseLayer};
    use crate::nn::loss::{bce_loss, bce_sigmoid_grad};

    /// Minimal trainable model: one sigmoid unit over two inputs.
    #[derive(Clone)]
    struct TinyLogit(DenseLayer);

    impl ParamSet for TinyLogit {
        fn blocks(&self) -> Vec<(String, &[f64])> {
            self.0.blocks()
        }
        fn blocks_mut(&mut self) -> Vec<(String, &mut [f64])> {
            self.0.blocks_mut()
        }
    }

    impl GradModel for TinyLogit {
        type Example = (Vec<f64>, f64);

        fn batch_gradients(
            &self,
            batch: &[&Self::Example],
            _dropout_rate: f64,
            _rng: &mut ChaCha8Rng,
        ) -> Result<(f64, Self)> {
            let mut grads = TinyLogit(DenseLayer::zeros(1, 2, Activation::Sigmoid));
            let mut total = 0.0;
            for (x, y) in batch.iter() {
                let (p, cache) = self.0.forward_cached(x)?;
                total += bce_loss(&p, &[*y]);
                let dz = bce_sigmoid_grad(&p, &[*y]);
                self.0.backward_preact(&cache, &dz, &mut grads.0);
            }
            let n = batch.len() as f64;
            grads.scale(1.0 / n);
            Ok((total / n, grads))
        }
    }

    fn xor_free_data() -> Vec<(Vec<f64>, f64)> {
        // Linearly separable: y = 1 iff x0 > x1.
        let mut data = Vec::new();
        for i in 0..40 {
            let a = (i % 7) as f64 / 7.0;
            let b = (i % 5) as f64 / 5.0;
            if a != b {
                data.push((vec![a, b], if a > b { 1.0 } else { 0.0 }));
            }
        }
        data
    }

    #[test]
    fn zero_epochs_leaves_weights_untouched() {
        let mut model = TinyLogit(DenseLayer::zeros(1, 2, Activation::Sigmoid));
        model.0.w.data = vec![0.3, -0.4];
        let hp = TrainHyperparams { epochs: 0, ..Default::default() };
        let report = train(&mut model, &xor_free_data(), &hp).unwrap();
        assert!(report.epoch_losses.is_empty());
        assert_eq!(report.adam_steps, 0);
        assert_eq!(model.0.w.data, vec![0.3, -0.4]);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let data = xor_free_data();
        let hp = TrainHyperparams { epochs: 5, batch_size: 8, ..Default::default() };
        let mut a = TinyLogit(DenseLayer::zeros(1, 2, Activation::Sigmoid));
        let mut b = TinyLogit(DenseLayer::zeros(1, 2, Activation::Sigmoid));
        let ra = train(&mut a, &data, &hp).unwrap();
        let rb = train(&mut b, &data, &hp).unwrap();
        assert_eq!(a.0.w.data, b.0.w.data);
        assert_eq!(ra.epoch_losses, rb.epoch_losses);
    }

    #[test]
    fn adam_step_count_is_epochs_times_batches() {
        let data = xor_free_data();
        let n = data.len();
        let hp = TrainHyperparams { epochs: 3, batch_size: 7, ..Default::default() };
        let mut model = TinyLogit(DenseLayer::zeros(1, 2, Activation::Sigmoid));
        let report = train(&mut model, &data, &hp).unwrap();
        assert_eq!(report.adam_steps, 3 * n.div_ceil(7) as u64);
    }

    #[test]
    fn empty_dataset_is_an_error() {
        let mut model = TinyLogit(DenseLayer::zeros(1, 2, Activation::Sigmoid));
        let err = train(&mut model, &[], &TrainHyperparams::default());
        assert!(matches!(err, Err(Error::EmptyDataset)));
    }

    #[test]
    fn loss_decreases_on_separable_data() {
        let data = xor_free_data();
        let hp = TrainHyperparams {
            epochs: 30,
            batch_size: 8,
            learning_rate: 0.05,
            dropout_rate: 0.0,
            seed: 1,
        };
        let mut model = TinyLogit(DenseLayer::zeros(1, 2, Activation::Sigmoid));
        let report = train(&mut model, &data, &hp).unwrap();
        assert!(report.epoch_losses.last().unwrap() < &report.epoch_losses[0]);
    }
}
