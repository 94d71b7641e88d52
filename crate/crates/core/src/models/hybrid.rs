//! The hybrid network: an LSTM over the recent state sequence combined with
//! a feedforward branch over the time/tendency features.
//!
//! Forward path: unroll the LSTM over the m past states (scalar input per
//! step, oldest first), dropout on the final hidden state, then a dense
//! layer; in parallel run x2 through the ReLU branch; concatenate (branch
//! output first), merge through a dense ReLU layer, dropout again, and
//! finish with a k-unit sigmoid output layer. The two dropout sites are the
//! only stochastic elements and are active only in training mode.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::Sample;
use crate::nn::dense::{Activation, DenseCache, DenseLayer};
use crate::nn::dropout::{dropout_apply, dropout_apply_batch, DropoutMask};
use crate::nn::linalg::Mat;
use crate::nn::loss::{bce_loss, bce_sigmoid_grad};
use crate::nn::lstm::{LstmCellParams, LstmStepCache};
use crate::nn::params::{prefixed, prefixed_mut, ParamSet};
use crate::nn::train::GradModel;

#[derive(Debug, Clone, PartialEq)]
pub struct HybridConfig {
    /// History window length (LSTM input steps).
    pub m: usize,
    /// Forecast horizon = output layer width.
    pub k: usize,
    /// Width of the x2 feature vector (3 + slots per day; 147 at 10-minute slots).
    pub x2_dim: usize,
    pub lstm_hidden: usize,
    /// Widths of the feedforward branch over x2.
    pub branch: Vec<usize>,
    /// Width of the dense layer after the LSTM block.
    pub post_lstm: usize,
    /// Width of the dense layer after concatenation.
    pub merge: usize,
    pub dropout_rate: f64,
    /// Probability at or above which a prediction becomes 1.
    pub threshold: f64,
}

impl Default for HybridConfig {
    fn default() -> Self {
        Self {
            m: 12,
            k: 6,
            x2_dim: 147,
            lstm_hidden: 36,
            branch: vec![64, 32, 16],
            post_lstm: 16,
            merge: 32,
            dropout_rate: 0.2,
            threshold: 0.5,
        }
    }
}

impl HybridConfig {
    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.k == 0 {
            return Err(Error::Config("m and k must be at least 1".to_string()));
        }
        if self.branch.is_empty() {
            return Err(Error::Config("branch must have at least one layer".to_string()));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::Config(format!("dropout rate {} not in [0, 1)", self.dropout_rate)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct HybridModel {
    pub config: HybridConfig,
    pub lstm: LstmCellParams,
    pub branch: Vec<DenseLayer>,
    pub post_lstm: DenseLayer,
    pub merge: DenseLayer,
    pub output: DenseLayer,
}

/// Dropout request for one forward pass: rate plus the mask generator.
type Dropout<'a> = Option<(f64, &'a mut ChaCha8Rng)>;

struct ForwardTrace {
    lstm_caches: Vec<LstmStepCache>,
    lstm_mask: DropoutMask,
    post_cache: DenseCache,
    branch_caches: Vec<DenseCache>,
    merge_cache: DenseCache,
    merge_mask: DropoutMask,
    out_cache: DenseCache,
    probs: Vec<f64>,
}

impl HybridModel {
    pub fn new(config: HybridConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lstm = LstmCellParams::new(1, config.lstm_hidden, &mut rng);
        let mut branch = Vec::with_capacity(config.branch.len());
        let mut in_dim = config.x2_dim;
        for &width in &config.branch {
            branch.push(DenseLayer::new(width, in_dim, Activation::Relu, &mut rng));
            in_dim = width;
        }
        let post_lstm = DenseLayer::new(config.post_lstm, config.lstm_hidden, Activation::Relu, &mut rng);
        let merge = DenseLayer::new(config.merge, in_dim + config.post_lstm, Activation::Relu, &mut rng);
        let output = DenseLayer::new(config.k, config.merge, Activation::Sigmoid, &mut rng);
        Ok(Self { config, lstm, branch, post_lstm, merge, output })
    }

    fn zero_grads(&self) -> Self {
        let mut grads = self.clone();
        for (_, block) in grads.blocks_mut() {
            for v in block {
                *v = 0.0;
            }
        }
        grads
    }

    fn check_input(&self, x1: &[f64], x2: &[f64]) -> Result<()> {
        if x1.len() != self.config.m {
            return Err(Error::DimMismatch(format!(
                "x1 has {} states, model expects m = {}",
                x1.len(),
                self.config.m
            )));
        }
        if x2.len() != self.config.x2_dim {
            return Err(Error::DimMismatch(format!(
                "x2 has {} features, model expects {}",
                x2.len(),
                self.config.x2_dim
            )));
        }
        Ok(())
    }

    fn forward_trace(&self, x1: &[f64], x2: &[f64], mut dropout: Dropout) -> Result<ForwardTrace> {
        self.check_input(x1, x2)?;
        // x1 is most-recent-first; the LSTM consumes it chronologically.
        let xs: Vec<Vec<f64>> = x1.iter().rev().map(|&v| vec![v]).collect();
        let (h_final, lstm_caches) = self.lstm.run_sequence(&xs)?;

        let (h_dropped, lstm_mask) = match dropout.as_mut() {
            Some((rate, rng)) => dropout_apply(&h_final, *rate, rng, true)?,
            None => (h_final.clone(), DropoutMask::identity(h_final.len())),
        };
        let (post_out, post_cache) = self.post_lstm.forward_cached(&h_dropped)?;

        let mut branch_caches = Vec::with_capacity(self.branch.len());
        let mut act = x2.to_vec();
        for layer in &self.branch {
            let (next, cache) = layer.forward_cached(&act)?;
            branch_caches.push(cache);
            act = next;
        }

        let mut concat = act;
        concat.extend_from_slice(&post_out);
        let (merge_out, merge_cache) = self.merge.forward_cached(&concat)?;
        let (merge_dropped, merge_mask) = match dropout.as_mut() {
            Some((rate, rng)) => dropout_apply(&merge_out, *rate, rng, true)?,
            None => (merge_out.clone(), DropoutMask::identity(merge_out.len())),
        };
        let (probs, out_cache) = self.output.forward_cached(&merge_dropped)?;
        Ok(ForwardTrace {
            lstm_caches,
            lstm_mask,
            post_cache,
            branch_caches,
            merge_cache,
            merge_mask,
            out_cache,
            probs,
        })
    }

    /// Forward pass on raw feature vectors. Dropout (at the config rate) is
    /// active iff a generator is supplied; without one the output is a
    /// deterministic function of (weights, features).
    pub fn forward_parts(&self, x1: &[f64], x2: &[f64], rng: Option<&mut ChaCha8Rng>) -> Result<Vec<f64>> {
        let dropout = rng.map(|r| (self.config.dropout_rate, r));
        Ok(self.forward_trace(x1, x2, dropout)?.probs)
    }

    /// Forward pass on a sample; returns k probabilities in (0, 1).
    pub fn forward(&self, sample: &Sample, rng: Option<&mut ChaCha8Rng>) -> Result<Vec<f64>> {
        self.forward_parts(&sample.x1, &sample.x2, rng)
    }

    /// Thresholded forecast: probability >= threshold maps to 1.
    pub fn predict_window(&self, sample: &Sample) -> Result<Vec<u8>> {
        let probs = self.forward(sample, None)?;
        Ok(threshold_probs(&probs, self.config.threshold))
    }

    /// Per-sample reference backward pass; the batched production path is
    /// checked against it (and against finite differences) in tests.
    #[allow(dead_code)]
    fn accumulate_sample(&self, sample: &Sample, dropout: Dropout, grads: &mut Self) -> Result<f64> {
        if sample.y.len() != self.config.k {
            return Err(Error::DimMismatch(format!(
                "target window has {} steps, model predicts k = {}",
                sample.y.len(),
                self.config.k
            )));
        }
        let trace = self.forward_trace(&sample.x1, &sample.x2, dropout)?;
        let loss = bce_loss(&trace.probs, &sample.y);

        let dz_out = bce_sigmoid_grad(&trace.probs, &sample.y);
        let d_merge_dropped = self.output.backward_preact(&trace.out_cache, &dz_out, &mut grads.output);
        let d_merge_out = trace.merge_mask.backward(&d_merge_dropped);
        let d_concat = self.merge.backward(&trace.merge_cache, &d_merge_out, &mut grads.merge);

        let branch_out_dim = self.branch.last().map(|l| l.out_dim()).unwrap_or(0);
        let (d_branch_out, d_post_out) = d_concat.split_at(branch_out_dim);

        let mut d_act = d_branch_out.to_vec();
        for i in (0..self.branch.len()).rev() {
            d_act = self.branch[i].backward(&trace.branch_caches[i], &d_act, &mut grads.branch[i]);
        }

        let d_h_dropped = self.post_lstm.backward(&trace.post_cache, d_post_out, &mut grads.post_lstm);
        let d_h = trace.lstm_mask.backward(&d_h_dropped);
        self.lstm.backward_sequence(&trace.lstm_caches, &d_h, &mut grads.lstm);
        Ok(loss)
    }

    /// Mean loss over a batch without dropout; the objective the
    /// finite-difference oracle probes.
    pub fn batch_loss(&self, batch: &[&Sample]) -> Result<f64> {
        if batch.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut total = 0.0;
        for sample in batch {
            let probs = self.forward(sample, None)?;
            total += bce_loss(&probs, &sample.y);
        }
        Ok(total / batch.len() as f64)
    }

    /// Central finite differences over every parameter, dropout disabled.
    pub fn finite_diff_grad(&self, batch: &[&Sample], eps: f64) -> Result<Self> {
        let mut probe = self.clone();
        crate::nn::grad_check::finite_diff_grad(&mut probe, eps, |model| model.batch_loss(batch))
    }
}

/// Maps probabilities to binary predictions; ties at the threshold go to 1.
pub fn threshold_probs(probs: &[f64], threshold: f64) -> Vec<u8> {
    probs.iter().map(|&p| (p >= threshold) as u8).collect()
}

impl ParamSet for HybridModel {
    fn blocks(&self) -> Vec<(String, &[f64])> {
        let mut out = prefixed("lstm", self.lstm.blocks());
        for (i, layer) in self.branch.iter().enumerate() {
            out.extend(prefixed(&format!("branch.{i}"), layer.blocks()));
        }
        out.extend(prefixed("post_lstm", self.post_lstm.blocks()));
        out.extend(prefixed("merge", self.merge.blocks()));
        out.extend(prefixed("output", self.output.blocks()));
        out
    }

    fn blocks_mut(&mut self) -> Vec<(String, &mut [f64])> {
        let mut out = prefixed_mut("lstm", self.lstm.blocks_mut());
        for (i, layer) in self.branch.iter_mut().enumerate() {
            out.extend(prefixed_mut(&format!("branch.{i}"), layer.blocks_mut()));
        }
        out.extend(prefixed_mut("post_lstm", self.post_lstm.blocks_mut()));
        out.extend(prefixed_mut("merge", self.merge.blocks_mut()));
        out.extend(prefixed_mut("output", self.output.blocks_mut()));
        out
    }
}

impl GradModel for HybridModel {
    type Example = Sample;

    /// Batched loss and gradients: the mini-batch runs through the network
    /// as matrices with one column per sample, so every weight matrix
    /// streams once per step instead of once per sample. Numerically this
    /// is the same mean loss/gradient as the per-sample path (summation
    /// order differs only within a coefficient); the unit tests pin the two
    /// paths against each other and against finite differences.
    fn batch_gradients(
        &self,
        batch: &[&Sample],
        dropout_rate: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<(f64, Self)> {
        if batch.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let m = self.config.m;
        let k = self.config.k;
        let x2_dim = self.config.x2_dim;
        for sample in batch {
            if sample.x1.len() != m || sample.x2.len() != x2_dim || sample.y.len() != k {
                return Err(Error::DimMismatch(format!(
                    "sample at step {} has x1[{}], x2[{}], y[{}]; model expects x1[{m}], x2[{x2_dim}], y[{k}]",
                    sample.origin_step,
                    sample.x1.len(),
                    sample.x2.len(),
                    sample.y.len()
                )));
            }
        }
        let bsz = batch.len();
        let training = dropout_rate > 0.0;

        // Chronological scalar inputs: step j carries x1[m-1-j] per sample.
        let xs: Vec<Mat> = (0..m)
            .map(|j| Mat {
                rows: 1,
                cols: bsz,
                data: batch.iter().map(|s| s.x1[m - 1 - j]).collect(),
            })
            .collect();
        let mut x2 = Mat::zeros(x2_dim, bsz);
        for (b, sample) in batch.iter().enumerate() {
            for r in 0..x2_dim {
                x2.data[r * bsz + b] = sample.x2[r];
            }
        }

        let (h, lstm_caches) = self.lstm.run_sequence_batch(&xs)?;
        let (h_dropped, lstm_mask) = dropout_apply_batch(&h, dropout_rate, rng, training)?;
        let (post_out, post_cache) = self.post_lstm.forward_batch(&h_dropped)?;

        let mut branch_caches = Vec::with_capacity(self.branch.len());
        let mut act = x2;
        for layer in &self.branch {
            let (next, cache) = layer.forward_batch(&act)?;
            branch_caches.push(cache);
            act = next;
        }
        let branch_out_dim = act.rows;

        let concat = Mat::vstack(&act, &post_out);
        let (merge_out, merge_cache) = self.merge.forward_batch(&concat)?;
        let (merge_dropped, merge_mask) = dropout_apply_batch(&merge_out, dropout_rate, rng, training)?;
        let (probs, out_cache) = self.output.forward_batch(&merge_dropped)?;

        // Mean over k per sample, then mean over the batch; dz = (p - y)/k
        // per element with the 1/batch factor folded into the final scale.
        let mut loss = 0.0;
        let mut dz = Mat::zeros(k, bsz);
        let kf = k as f64;
        for (b, sample) in batch.iter().enumerate() {
            for (r, &y) in sample.y.iter().enumerate() {
                let idx = r * bsz + b;
                let p = probs.data[idx];
                let pc = p.clamp(crate::nn::loss::PROB_CLAMP, 1.0 - crate::nn::loss::PROB_CLAMP);
                loss -= (y * pc.ln() + (1.0 - y) * (1.0 - pc).ln()) / kf;
                dz.data[idx] = (p - y) / kf;
            }
        }

        let mut grads = self.zero_grads();
        let d_merge_dropped = self.output.backward_preact_batch(&out_cache, &dz, &mut grads.output);
        let d_merge_out = merge_mask.backward_batch(&d_merge_dropped);
        let d_concat = self.merge.backward_batch(&merge_cache, &d_merge_out, &mut grads.merge);
        let (d_branch, d_post) = d_concat.split_rows(branch_out_dim);

        let mut d_act = d_branch;
        for i in (0..self.branch.len()).rev() {
            d_act = self.branch[i].backward_batch(&branch_caches[i], &d_act, &mut grads.branch[i]);
        }
        let d_h_dropped = self.post_lstm.backward_batch(&post_cache, &d_post, &mut grads.post_lstm);
        let d_h = lstm_mask.backward_batch(&d_h_dropped);
        self.lstm.backward_sequence_batch(&lstm_caches, &d_h, &mut grads.lstm);

        let n = bsz as f64;
        grads.scale(1.0 / n);
        Ok((loss / n, grads))
    }
}
