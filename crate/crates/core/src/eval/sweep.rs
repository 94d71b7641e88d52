//! Hyperparameter sensitivity sweeps: vary one setting over a grid while
//! everything else stays fixed, one full train-and-evaluate cycle per grid
//! value per run.

use std::str::FromStr;

use crate::error::{Error, Result};

use super::experiment::{evaluate_method, ChargerData, Method, MethodConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    LearningRate,
    LstmHidden,
    Dropout,
    Epochs,
    BatchSize,
    /// Number of feedforward-branch layers (prefix of the configured widths).
    BranchLayers,
}

impl SweepParam {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::LearningRate => "learning_rate",
            Self::LstmHidden => "lstm_hidden",
            Self::Dropout => "dropout",
            Self::Epochs => "epochs",
            Self::BatchSize => "batch_size",
            Self::BranchLayers => "branch_layers",
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "learning_rate" => Ok(Self::LearningRate),
            "lstm_hidden" => Ok(Self::LstmHidden),
            "dropout" => Ok(Self::Dropout),
            "epochs" => Ok(Self::Epochs),
            "batch_size" => Ok(Self::BatchSize),
            "branch_layers" => Ok(Self::BranchLayers),
            other => Err(Error::Config(format!(
                "unknown sweep parameter '{other}' (expected learning_rate, lstm_hidden, dropout, \
                 epochs, batch_size, or branch_layers)"
            ))),
        }
    }
}

fn as_count(param: SweepParam, value: f64) -> Result<usize> {
    if value.fract() != 0.0 || value < 1.0 {
        return Err(Error::Config(format!(
            "sweep value {value} for {} must be a positive integer",
            param.as_str()
        )));
    }
    Ok(value as usize)
}

/// Applies one grid value to a copy of the base configuration.
pub fn apply_sweep_value(base: &MethodConfig, param: SweepParam, value: f64) -> Result<MethodConfig> {
    let mut cfg = base.clone();
    match param {
        SweepParam::LearningRate => {
            if value <= 0.0 {
                return Err(Error::Config(format!("learning rate {value} must be positive")));
            }
            cfg.hp.learning_rate = value;
        }
        SweepParam::LstmHidden => cfg.hybrid.lstm_hidden = as_count(param, value)?,
        SweepParam::Dropout => {
            if !(0.0..1.0).contains(&value) {
                return Err(Error::Config(format!("dropout {value} not in [0, 1)")));
            }
            cfg.hp.dropout_rate = value;
            cfg.hybrid.dropout_rate = value;
        }
        SweepParam::Epochs => cfg.hp.epochs = as_count(param, value)?,
        SweepParam::BatchSize => cfg.hp.batch_size = as_count(param, value)?,
        SweepParam::BranchLayers => {
            let layers = as_count(param, value)?;
            if layers > cfg.hybrid.branch.len() {
                return Err(Error::Config(format!(
                    "branch_layers {layers} exceeds the {} configured widths",
                    cfg.hybrid.branch.len()
                )));
            }
            cfg.hybrid.branch.truncate(layers);
        }
    }
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// Mean test accuracy over all chargers and runs.
    pub mean_accuracy: f64,
}

/// One full hybrid train+evaluate cycle per grid value per run; rows come
/// back in grid order.
#[allow(clippy::too_many_arguments)]
pub fn sensitivity_sweep(
    data: &[ChargerData],
    k: usize,
    base: &MethodConfig,
    param: SweepParam,
    grid: &[f64],
    runs: usize,
    base_seed: u64,
    pooled: bool,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".to_string()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &value in grid {
        let cfg = apply_sweep_value(base, param, value)?;
        let reports = evaluate_method(data, Method::Hybrid, k, runs, base_seed, &cfg, pooled)?;
        let mean_accuracy =
            reports.iter().map(|r| r.mean_accuracy).sum::<f64>() / reports.len() as f64;
        rows.push(SweepRow { value, mean_accuracy });
    }
    Ok(rows)
}
