//! Plain recurrent baselines.
//!
//! Input is a short sequence of feature frames, one per historical step:
//! frame V_s = {slot(s)/spd, dow(s)/6, weekend(s), profile(s), y_{s-1}},
//! fed chronologically (V_{t-2}, V_{t-1}, V_t by default). One LSTM or GRU
//! block, a dense ReLU layer, one dropout site, and a k-unit sigmoid output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::DayTypeProfiles;
use crate::ingest::OccupancySeries;
use crate::nn::dense::{Activation, DenseCache, DenseLayer};
use crate::nn::dropout::{dropout_apply, DropoutMask};
use crate::nn::gru::{GruCellParams, GruStepCache};
use crate::nn::loss::{bce_loss, bce_sigmoid_grad};
use crate::nn::lstm::{LstmCellParams, LstmStepCache};
use crate::nn::params::{prefixed, prefixed_mut, ParamSet};
use crate::nn::train::GradModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecurrentKind {
    Lstm,
    Gru,
}

impl RecurrentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Lstm => "lstm",
            Self::Gru => "gru",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub kind: RecurrentKind,
    pub k: usize,
    /// Feature frame width (4 + slots per day; 148 at 10-minute slots).
    pub frame_dim: usize,
    /// Number of historical frames in the input sequence.
    pub frames: usize,
    pub hidden: usize,
    pub dense: usize,
    pub dropout_rate: f64,
    pub threshold: f64,
}

impl BaselineConfig {
    pub fn new(kind: RecurrentKind, k: usize) -> Self {
        Self {
            kind,
            k,
            frame_dim: 148,
            frames: 3,
            hidden: 36,
            dense: 32,
            dropout_rate: 0.2,
            threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub enum RecurrentCell {
    Lstm(LstmCellParams),
    Gru(GruCellParams),
}

enum CellTrace {
    Lstm(Vec<LstmStepCache>),
    Gru(Vec<GruStepCache>),
}

impl RecurrentCell {
    fn run_sequence(&self, xs: &[Vec<f64>]) -> Result<(Vec<f64>, CellTrace)> {
        match self {
            Self::Lstm(p) => {
                let (h, caches) = p.run_sequence(xs)?;
                Ok((h, CellTrace::Lstm(caches)))
            }
            Self::Gru(p) => {
                let (h, caches) = p.run_sequence(xs)?;
                Ok((h, CellTrace::Gru(caches)))
            }
        }
    }

    fn backward_sequence(&self, trace: &CellTrace, d_h: &[f64], grads: &mut RecurrentCell) {
        match (self, trace, grads) {
            (Self::Lstm(p), CellTrace::Lstm(caches), RecurrentCell::Lstm(g)) => {
                p.backward_sequence(caches, d_h, g)
            }
            (Self::Gru(p), CellTrace::Gru(caches), RecurrentCell::Gru(g)) => {
                p.backward_sequence(caches, d_h, g)
            }
            _ => unreachable!("cell kind is fixed at construction"),
        }
    }
}

/// One baseline training/evaluation instance: chronological frames plus the
/// k-step target window.
#[derive(Debug, Clone)]
pub struct FrameSample {
    pub frames: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub origin_step: usize,
}

/// Feature frame for step s; needs s >= 1 for the lagged state.
pub fn build_frame(series: &OccupancySeries, profiles: &DayTypeProfiles, s: usize) -> Result<Vec<f64>> {
    if s == 0 {
        return Err(Error::SampleBounds("frame step 0 has no lagged state".to_string()));
    }
    if s > series.len() {
        return Err(Error::SampleBounds(format!("frame step {s} past series end {}", series.len())));
    }
    let spd = series.slots_per_day();
    let weekend = series.is_weekend(s);
    let mut frame = Vec::with_capacity(4 + spd);
    frame.push(series.slot_of_day(s) as f64 / spd as f64);
    frame.push(series.day_of_week(s) as f64 / 6.0);
    frame.push(if weekend { 1.0 } else { 0.0 });
    frame.extend_from_slice(profiles.for_day_type(weekend));
    frame.push(series.state(s - 1) as f64);
    Ok(frame)
}

pub fn build_frame_sample(
    series: &OccupancySeries,
    profiles: &DayTypeProfiles,
    t: usize,
    frames: usize,
    k: usize,
) -> Result<FrameSample> {
    if t < frames {
        return Err(Error::SampleBounds(format!("step {t} needs {frames} history frames")));
    }
    if t + k > series.len() {
        return Err(Error::SampleBounds(format!(
            "step {t} with horizon {k} exceeds the series end {}",
            series.len()
        )));
    }
    let frames: Vec<Vec<f64>> = (0..frames)
        .rev()
        .map(|back| build_frame(series, profiles, t - back))
        .collect::<Result<_>>()?;
    let y = (0..k).map(|j| series.state(t + j) as f64).collect();
    Ok(FrameSample { frames, y, origin_step: t })
}

pub fn build_frame_dataset(
    series: &OccupancySeries,
    profiles: &DayTypeProfiles,
    frames: usize,
    k: usize,
) -> Result<Vec<FrameSample>> {
    if series.len() < frames + k {
        return Err(Error::SeriesTooShort { len: series.len(), needed: frames + k });
    }
    (frames..=series.len() - k)
        .map(|t| build_frame_sample(series, profiles, t, frames, k))
        .collect()
}

#[derive(Debug, Clone)]
pub struct RecurrentBaseline {
    pub config: BaselineConfig,
    pub cell: RecurrentCell,
    pub dense: DenseLayer,
    pub output: DenseLayer,
}

/// Builds a seeded plain LSTM or GRU baseline network.
pub fn build_baseline_recurrent(kind: RecurrentKind, mut config: BaselineConfig, seed: u64) -> RecurrentBaseline {
    config.kind = kind;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cell = match kind {
        RecurrentKind::Lstm => RecurrentCell::Lstm(LstmCellParams::new(config.frame_dim, config.hidden, &mut rng)),
        RecurrentKind::Gru => RecurrentCell::Gru(GruCellParams::new(config.frame_dim, config.hidden, &mut rng)),
    };
    let dense = DenseLayer::new(config.dense, config.hidden, Activation::Relu, &mut rng);
    let output = DenseLayer::new(config.k, config.dense, Activation::Sigmoid, &mut rng);
    RecurrentBaseline { config, cell, dense, output }
}

struct BaselineTrace {
    cell_trace: CellTrace,
    dense_cache: DenseCache,
    mask: DropoutMask,
    out_cache: DenseCache,
    probs: Vec<f64>,
}

impl RecurrentBaseline {
    fn zero_grads(&self) -> Self {
        let mut grads = self.clone();
        for (_, block) in grads.blocks_mut() {
            for v in block {
                *v = 0.0;
            }
        }
        grads
    }

    fn forward_trace(
        &self,
        frames: &[Vec<f64>],
        dropout: Option<(f64, &mut ChaCha8Rng)>,
    ) -> Result<BaselineTrace> {
        if frames.len() != self.config.frames {
            return Err(Error::DimMismatch(format!(
                "expected {} frames, got {}",
                self.config.frames,
                frames.len()
            )));
        }
        let (h, cell_trace) = self.cell.run_sequence(frames)?;
        let (dense_out, dense_cache) = self.dense.forward_cached(&h)?;
        let (dropped, mask) = match dropout {
            Some((rate, rng)) => dropout_apply(&dense_out, rate, rng, true)?,
            None => (dense_out.clone(), DropoutMask::identity(dense_out.len())),
        };
        let (probs, out_cache) = self.output.forward_cached(&dropped)?;
        Ok(BaselineTrace { cell_trace, dense_cache, mask, out_cache, probs })
    }

    pub fn forward(&self, frames: &[Vec<f64>], rng: Option<&mut ChaCha8Rng>) -> Result<Vec<f64>> {
        let dropout = rng.map(|r| (self.config.dropout_rate, r));
        Ok(self.forward_trace(frames, dropout)?.probs)
    }

    pub fn predict_window(&self, frames: &[Vec<f64>]) -> Result<Vec<u8>> {
        let probs = self.forward(frames, None)?;
        Ok(super::hybrid::threshold_probs(&probs, self.config.threshold))
    }

    pub fn batch_loss(&self, batch: &[&FrameSample]) -> Result<f64> {
        if batch.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut total = 0.0;
        for s in batch {
            let probs = self.forward(&s.frames, None)?;
            total += bce_loss(&probs, &s.y);
        }
        Ok(total / batch.len() as f64)
    }

    pub fn finite_diff_grad(&self, batch: &[&FrameSample], eps: f64) -> Result<Self> {
        let mut probe = self.clone();
        crate::nn::grad_check::finite_diff_grad(&mut probe, eps, |model| model.batch_loss(batch))
    }
}

impl ParamSet for RecurrentBaseline {
    fn blocks(&self) -> Vec<(String, &[f64])> {
        let mut out = match &self.cell {
            RecurrentCell::Lstm(p) => prefixed("cell", p.blocks()),
            RecurrentCell::Gru(p) => prefixed("cell", p.blocks()),
        };
        out.extend(prefixed("dense", self.dense.blocks()));
        out.extend(prefixed("output", self.output.blocks()));
        out
    }

    fn blocks_mut(&mut self) -> Vec<(String, &mut [f64])> {
        let mut out = match &mut self.cell {
            RecurrentCell::Lstm(p) => prefixed_mut("cell", p.blocks_mut()),
            RecurrentCell::Gru(p) => prefixed_mut("cell", p.blocks_mut()),
        };
        out.extend(prefixed_mut("dense", self.dense.blocks_mut()));
        out.extend(prefixed_mut("output", self.output.blocks_mut()));
        out
    }
}

impl GradModel for RecurrentBaseline {
    type Example = FrameSample;

    fn batch_gradients(
        &self,
        batch: &[&FrameSample],
        dropout_rate: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<(f64, Self)> {
        if batch.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut grads = self.zero_grads();
        let mut total = 0.0;
        for sample in batch {
            if sample.y.len() != self.config.k {
                return Err(Error::DimMismatch(format!(
                    "target window has {} steps, model predicts k = {}",
                    sample.y.len(),
                    self.config.k
                )));
            }
            let dropout = if dropout_rate > 0.0 { Some((dropout_rate, &mut *rng)) } else { None };
            let trace = self.forward_trace(&sample.frames, dropout)?;
            total += bce_loss(&trace.probs, &sample.y);

            let dz_out = bce_sigmoid_grad(&trace.probs, &sample.y);
            let d_dropped = self.output.backward_preact(&trace.out_cache, &dz_out, &mut grads.output);
            let d_dense_out = trace.mask.backward(&d_dropped);
            let d_h = self.dense.backward(&trace.dense_cache, &d_dense_out, &mut grads.dense);
            self.cell.backward_sequence(&trace.cell_trace, &d_h, &mut grads.cell);
        }
        let n = batch.len() as f64;
        grads.scale(1.0 / n);
        Ok((total / n, grads))
    }
}
