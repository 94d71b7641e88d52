//! Full train-and-evaluate cycles per method, charger, and horizon.
//!
//! Run seeds derive from (base seed, method, k, run index, charger), so
//! results never depend on execution order. Pooled mode trains one model
//! per (k, run) on the concatenated per-charger training sets and scores it
//! per charger; the default is one model per charger.

use crate::error::{Error, Result};
use crate::features::{build_dataset, day_type_profile, DayTypeProfiles};
use crate::ingest::{split_train_test, OccupancySeries};
use crate::models::{
    build_baseline_recurrent, build_frame_dataset, build_logistic_dataset, logistic_fit,
    BaselineConfig, Forecaster, HybridConfig, HybridModel, LogisticHyperparams, LogisticModel,
    RecurrentBaseline, RecurrentKind,
};
use crate::nn::{train, TrainHyperparams};
use crate::seeds;

use super::rolling::{score_windows, HorizonReport, RunScore};

const SALT_INIT: u64 = 0x11;
const SALT_TRAIN: u64 = 0x22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Hybrid,
    BaselineLstm,
    BaselineGru,
    Logistic,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Hybrid => "hybrid",
            Self::BaselineLstm => "lstm",
            Self::BaselineGru => "gru",
            Self::Logistic => "logistic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hybrid" => Some(Self::Hybrid),
            "lstm" => Some(Self::BaselineLstm),
            "gru" => Some(Self::BaselineGru),
            "logistic" => Some(Self::Logistic),
            _ => None,
        }
    }

    fn salt(&self) -> u64 {
        match self {
            Self::Hybrid => 1,
            Self::BaselineLstm => 2,
            Self::BaselineGru => 3,
            Self::Logistic => 4,
        }
    }
}

/// One charger's series with its split point and training-split profiles.
#[derive(Debug, Clone)]
pub struct ChargerData {
    pub charger_id: String,
    pub series: OccupancySeries,
    pub profiles: DayTypeProfiles,
    pub test_start: usize,
}

impl ChargerData {
    /// Splits the series, computes the day-type profiles from the training
    /// side, and keeps the full series for evaluation.
    pub fn prepare(series: OccupancySeries, split_fraction: f64) -> Result<Self> {
        let split = split_train_test(&series, split_fraction)?;
        let profiles = day_type_profile(&split.train)?;
        Ok(Self {
            charger_id: series.charger_id.clone(),
            test_start: split.train.len(),
            series,
            profiles,
        })
    }

    pub fn train_series(&self) -> OccupancySeries {
        self.series.split_at(self.test_start).0
    }
}

/// Architecture and training settings shared by every run of an experiment.
#[derive(Debug, Clone)]
pub struct MethodConfig {
    pub hybrid: HybridConfig,
    pub baseline_hidden: usize,
    pub baseline_dense: usize,
    pub hp: TrainHyperparams,
    pub logistic: LogisticHyperparams,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            hybrid: HybridConfig::default(),
            baseline_hidden: 36,
            baseline_dense: 32,
            hp: TrainHyperparams::default(),
            logistic: LogisticHyperparams::default(),
        }
    }
}

impl MethodConfig {
    fn hybrid_config(&self, data: &ChargerData, k: usize) -> HybridConfig {
        let mut config = self.hybrid.clone().with_k(k);
        config.x2_dim = 3 + data.series.slots_per_day();
        config.dropout_rate = self.hp.dropout_rate;
        config
    }

    fn baseline_config(&self, data: &ChargerData, kind: RecurrentKind, k: usize) -> BaselineConfig {
        let mut config = BaselineConfig::new(kind, k);
        config.frame_dim = 4 + data.series.slots_per_day();
        config.hidden = self.baseline_hidden;
        config.dense = self.baseline_dense;
        config.dropout_rate = self.hp.dropout_rate;
        config.threshold = self.hybrid.threshold;
        config
    }
}

pub fn run_seed(base: u64, method: Method, k: usize, run: usize, charger_id: Option<&str>) -> u64 {
    let mut salts = vec![method.salt(), k as u64, run as u64];
    if let Some(id) = charger_id {
        salts.push(seeds::fnv1a(id.as_bytes()));
    }
    seeds::mix(base, &salts)
}

pub fn train_hybrid(data: &ChargerData, k: usize, cfg: &MethodConfig, seed: u64) -> Result<HybridModel> {
    train_hybrid_pooled(std::slice::from_ref(data), k, cfg, seed)
}

/// Trains one hybrid model on the concatenated training sets.
pub fn train_hybrid_pooled(
    data: &[ChargerData],
    k: usize,
    cfg: &MethodConfig,
    seed: u64,
) -> Result<HybridModel> {
    let first = data.first().ok_or(Error::EmptyDataset)?;
    let config = cfg.hybrid_config(first, k);
    let mut samples = Vec::new();
    for d in data {
        let train = d.train_series();
        samples.extend(build_dataset(&train, &d.profiles, config.m, k)?.samples);
    }
    let mut model = HybridModel::new(config, seeds::mix(seed, &[SALT_INIT]))?;
    let hp = cfg.hp.clone().with_seed(seeds::mix(seed, &[SALT_TRAIN]));
    train(&mut model, &samples, &hp)?;
    Ok(model)
}

pub fn train_baseline(
    data: &ChargerData,
    kind: RecurrentKind,
    k: usize,
    cfg: &MethodConfig,
    seed: u64,
) -> Result<RecurrentBaseline> {
    train_baseline_pooled(std::slice::from_ref(data), kind, k, cfg, seed)
}

pub fn train_baseline_pooled(
    data: &[ChargerData],
    kind: RecurrentKind,
    k: usize,
    cfg: &MethodConfig,
    seed: u64,
) -> Result<RecurrentBaseline> {
    let first = data.first().ok_or(Error::EmptyDataset)?;
    let config = cfg.baseline_config(first, kind, k);
    let mut samples = Vec::new();
    for d in data {
        let train = d.train_series();
        samples.extend(build_frame_dataset(&train, &d.profiles, config.frames, k)?);
    }
    let mut model = build_baseline_recurrent(kind, config, seeds::mix(seed, &[SALT_INIT]));
    let hp = cfg.hp.clone().with_seed(seeds::mix(seed, &[SALT_TRAIN]));
    train(&mut model, &samples, &hp)?;
    Ok(model)
}

pub fn fit_logistic(data: &ChargerData, cfg: &MethodConfig, seed: u64) -> Result<LogisticModel> {
    fit_logistic_pooled(std::slice::from_ref(data), cfg, seed)
}

pub fn fit_logistic_pooled(data: &[ChargerData], cfg: &MethodConfig, seed: u64) -> Result<LogisticModel> {
    let mut rows = Vec::new();
    for d in data {
        rows.extend(build_logistic_dataset(&d.train_series())?);
    }
    let hp = LogisticHyperparams { seed: seeds::mix(seed, &[SALT_INIT]), ..cfg.logistic.clone() };
    logistic_fit(&rows, &hp)
}

fn train_method(
    data: &[ChargerData],
    method: Method,
    k: usize,
    cfg: &MethodConfig,
    seed: u64,
) -> Result<Box<dyn Forecaster>> {
    Ok(match method {
        Method::Hybrid => Box::new(train_hybrid_pooled(data, k, cfg, seed)?),
        Method::BaselineLstm => Box::new(train_baseline_pooled(data, RecurrentKind::Lstm, k, cfg, seed)?),
        Method::BaselineGru => Box::new(train_baseline_pooled(data, RecurrentKind::Gru, k, cfg, seed)?),
        Method::Logistic => Box::new(fit_logistic_pooled(data, cfg, seed)?),
    })
}

/// Trains and rolls the given method over every charger: `runs` repeated
/// trainings per charger (or per pool), one report per charger, in input
/// order.
pub fn evaluate_method(
    data: &[ChargerData],
    method: Method,
    k: usize,
    runs: usize,
    base_seed: u64,
    cfg: &MethodConfig,
    pooled: bool,
) -> Result<Vec<HorizonReport>> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if runs == 0 {
        return Err(Error::Config("runs must be at least 1".to_string()));
    }
    let mut per_charger_runs: Vec<Vec<RunScore>> = vec![Vec::with_capacity(runs); data.len()];
    for run in 0..runs {
        if pooled {
            let seed = run_seed(base_seed, method, k, run, None);
            let model = train_method(data, method, k, cfg, seed)?;
            for (i, d) in data.iter().enumerate() {
                let (accuracy, f1, windows) =
                    score_windows(model.as_ref(), &d.series, &d.profiles, d.test_start, k)?;
                per_charger_runs[i].push(RunScore { seed, accuracy, f1, windows });
            }
        } else {
            for (i, d) in data.iter().enumerate() {
                let seed = run_seed(base_seed, method, k, run, Some(&d.charger_id));
                let model = train_method(std::slice::from_ref(d), method, k, cfg, seed)?;
                let (accuracy, f1, windows) =
                    score_windows(model.as_ref(), &d.series, &d.profiles, d.test_start, k)?;
                per_charger_runs[i].push(RunScore { seed, accuracy, f1, windows });
            }
        }
    }
    Ok(data
        .iter()
        .zip(per_charger_runs)
        .map(|(d, runs)| HorizonReport::from_runs(d.charger_id.clone(), k, runs))
        .collect())
}
