//! Forecasting models: the hybrid network, plain recurrent baselines, and
//! the walk-forward logistic baseline.

pub mod baseline;
pub mod hybrid;
pub mod logistic;

pub use baseline::{
    build_baseline_recurrent, build_frame, build_frame_dataset, build_frame_sample, BaselineConfig,
    FrameSample, RecurrentBaseline, RecurrentKind,
};
pub use hybrid::{threshold_probs, HybridConfig, HybridModel};
pub use logistic::{
    build_logistic_dataset, logistic_features, logistic_fit, logistic_predict, walk_forward_predict,
    LogisticHyperparams, LogisticModel, LOGISTIC_FEATURES,
};

use crate::error::{Error, Result};
use crate::features::{build_inference_features, DayTypeProfiles};
use crate::ingest::OccupancySeries;

/// A trained model that can forecast the k-step window starting at step t,
/// given the true observed history before t.
pub trait Forecaster: Send {
    fn forecast_window(
        &self,
        series: &OccupancySeries,
        profiles: &DayTypeProfiles,
        t: usize,
        k: usize,
    ) -> Result<Vec<u8>>;
}

impl Forecaster for HybridModel {
    fn forecast_window(
        &self,
        series: &OccupancySeries,
        profiles: &DayTypeProfiles,
        t: usize,
        k: usize,
    ) -> Result<Vec<u8>> {
        if k != self.config.k {
            return Err(Error::DimMismatch(format!(
                "model predicts k = {}, window asks for {k}",
                self.config.k
            )));
        }
        let (x1, x2) = build_inference_features(series, profiles, t, self.config.m)?;
        let probs = self.forward_parts(&x1, &x2, None)?;
        Ok(threshold_probs(&probs, self.config.threshold))
    }
}

impl Forecaster for RecurrentBaseline {
    fn forecast_window(
        &self,
        series: &OccupancySeries,
        profiles: &DayTypeProfiles,
        t: usize,
        k: usize,
    ) -> Result<Vec<u8>> {
        if k != self.config.k {
            return Err(Error::DimMismatch(format!(
                "model predicts k = {}, window asks for {k}",
                self.config.k
            )));
        }
        if t < self.config.frames {
            return Err(Error::SampleBounds(format!(
                "step {t} needs {} history frames",
                self.config.frames
            )));
        }
        let frames: Vec<Vec<f64>> = (0..self.config.frames)
            .rev()
            .map(|back| build_frame(series, profiles, t - back))
            .collect::<Result<_>>()?;
        self.predict_window(&frames)
    }
}

impl Forecaster for LogisticModel {
    fn forecast_window(
        &self,
        series: &OccupancySeries,
        _profiles: &DayTypeProfiles,
        t: usize,
        k: usize,
    ) -> Result<Vec<u8>> {
        walk_forward_predict(self, series, t, k, 0.5)
    }
}
