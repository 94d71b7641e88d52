//! Logistic-regression baseline with walk-forward multistep prediction.
//!
//! Features per step t: {slot(t)/spd, dow(t)/6, weekend(t), y_{t-1}, y_{t-2},
//! y_{t-3}} — the six-feature layout used by the benchmark classifiers. The
//! classifier predicts one step; multistep forecasts feed each prediction
//! back as the next step's most recent state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::OccupancySeries;
use crate::nn::linalg::sigmoid;

pub const LOGISTIC_FEATURES: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: [f64; LOGISTIC_FEATURES],
    pub intercept: f64,
}

/// Full-batch gradient-descent settings: fixed step count, seeded tiny
/// uniform init, so a fit is fully deterministic.
#[derive(Debug, Clone)]
pub struct LogisticHyperparams {
    pub learning_rate: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for LogisticHyperparams {
    fn default() -> Self {
        Self { learning_rate: 0.5, iterations: 2000, seed: 42 }
    }
}

/// Feature vector for step t; needs y_{t-3}, so t >= 3.
pub fn logistic_features(series: &OccupancySeries, t: usize) -> Result<[f64; LOGISTIC_FEATURES]> {
    if t < 3 {
        return Err(Error::SampleBounds(format!("step {t} needs 3 history states")));
    }
    if t > series.len() {
        return Err(Error::SampleBounds(format!("step {t} past series end {}", series.len())));
    }
    Ok(time_features_with_history(
        series,
        t,
        [series.state(t - 1) as f64, series.state(t - 2) as f64, series.state(t - 3) as f64],
    ))
}

fn time_features_with_history(
    series: &OccupancySeries,
    t: usize,
    lags: [f64; 3],
) -> [f64; LOGISTIC_FEATURES] {
    let spd = series.slots_per_day();
    [
        series.slot_of_day(t) as f64 / spd as f64,
        series.day_of_week(t) as f64 / 6.0,
        if series.is_weekend(t) { 1.0 } else { 0.0 },
        lags[0],
        lags[1],
        lags[2],
    ]
}

/// One (features, target) pair per step t in 3..len.
pub fn build_logistic_dataset(series: &OccupancySeries) -> Result<Vec<([f64; LOGISTIC_FEATURES], f64)>> {
    if series.len() < 4 {
        return Err(Error::SeriesTooShort { len: series.len(), needed: 4 });
    }
    (3..series.len())
        .map(|t| Ok((logistic_features(series, t)?, series.state(t) as f64)))
        .collect()
}

pub fn logistic_predict(model: &LogisticModel, features: &[f64; LOGISTIC_FEATURES]) -> f64 {
    let z = model.intercept
        + model.weights.iter().zip(features).map(|(w, x)| w * x).sum::<f64>();
    sigmoid(z)
}

/// Fits by full-batch gradient descent on the mean BCE.
pub fn logistic_fit(
    data: &[([f64; LOGISTIC_FEATURES], f64)],
    hp: &LogisticHyperparams,
) -> Result<LogisticModel> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if hp.learning_rate <= 0.0 {
        return Err(Error::Config(format!("learning_rate must be > 0, got {}", hp.learning_rate)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut model = LogisticModel {
        weights: std::array::from_fn(|_| rng.random_range(-0.01..0.01)),
        intercept: 0.0,
    };
    let n = data.len() as f64;
    for _ in 0..hp.iterations {
        let mut grad_w = [0.0; LOGISTIC_FEATURES];
        let mut grad_b = 0.0;
        for (x, y) in data {
            let err = logistic_predict(&model, x) - y;
            for (g, xv) in grad_w.iter_mut().zip(x) {
                *g += err * xv;
            }
            grad_b += err;
        }
        for (w, g) in model.weights.iter_mut().zip(&grad_w) {
            *w -= hp.learning_rate * g / n;
        }
        model.intercept -= hp.learning_rate * grad_b / n;
    }
    if !model.intercept.is_finite() || model.weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::NonFinite("logistic weights".to_string()));
    }
    Ok(model)
}

/// Multistep walk-forward forecast from step t: at each of the k steps the
/// classifier sees the calendar features of that step and the last three
/// states (true history first, then its own thresholded predictions), and
/// the slot index rolls over day boundaries through the calendar accessors.
pub fn walk_forward_predict(
    model: &LogisticModel,
    series: &OccupancySeries,
    t: usize,
    k: usize,
    threshold: f64,
) -> Result<Vec<u8>> {
    if t < 3 {
        return Err(Error::SampleBounds(format!("walk-forward at step {t} needs 3 history states")));
    }
    if t > series.len() {
        return Err(Error::SampleBounds(format!("step {t} past series end {}", series.len())));
    }
    let mut history = vec![series.state(t - 3) as f64, series.state(t - 2) as f64, series.state(t - 1) as f64];
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let step = t + j;
        let lags = [history[history.len() - 1], history[history.len() - 2], history[history.len() - 3]];
        let features = time_features_with_history(series, step, lags);
        let p = logistic_predict(model, &features);
        let pred = (p >= threshold) as u8;
        out.push(pred);
        history.push(pred as f64);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn series(states: Vec<u8>) -> OccupancySeries {
        // Pad to full days for construction, then slice via split if needed.
        let mut padded = states;
        let rem = padded.len() % 144;
        if rem != 0 {
            padded.extend(std::iter::repeat_n(0u8, 144 - rem));
        }
        OccupancySeries::new("CP001", NaiveDate::from_ymd_opt(2018, 3, 5).unwrap(), 10, padded).unwrap()
    }

    #[test]
    fn zero_weights_predict_half() {
        let model = LogisticModel { weights: [0.0; 6], intercept: 0.0 };
        assert_eq!(logistic_predict(&model, &[0.3, 0.5, 1.0, 1.0, 0.0, 1.0]), 0.5);
    }

    #[test]
    fn prediction_is_monotone_in_positive_weight_features() {
        let model = LogisticModel { weights: [0.0, 0.0, 0.0, 2.0, 0.0, 0.0], intercept: 0.0 };
        let low = logistic_predict(&model, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let high = logistic_predict(&model, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(high > low);
    }

    #[test]
    fn matches_hand_sigmoid() {
        let model = LogisticModel { weights: [0.5, -1.0, 0.25, 2.0, -0.5, 0.1], intercept: 0.3 };
        let x = [0.2, 0.4, 1.0, 1.0, 0.0, 1.0];
        let z: f64 = 0.3 + 0.5 * 0.2 - 1.0 * 0.4 + 0.25 + 2.0 - 0.0 + 0.1;
        let expected = 1.0 / (1.0 + (-z).exp());
        assert!((logistic_predict(&model, &x) - expected).abs() <= 1e-12);
    }

    #[test]
    fn fit_is_deterministic() {
        let states: Vec<u8> = (0..288).map(|i| ((i / 5) % 2) as u8).collect();
        let s = series(states);
        let data = build_logistic_dataset(&s).unwrap();
        let hp = LogisticHyperparams { iterations: 50, ..Default::default() };
        let a = logistic_fit(&data, &hp).unwrap();
        let b = logistic_fit(&data, &hp).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn learns_a_copy_last_state_rule() {
        // Linearly separable: the target is exactly the y_{t-1} feature.
        let mut state = 0xACE_u64;
        let mut next = move || {
            state = crate::seeds::splitmix64(state);
            state
        };
        let data: Vec<([f64; 6], f64)> = (0..200)
            .map(|_| {
                let lag1 = (next() % 2) as f64;
                let x = [
                    (next() % 144 + 1) as f64 / 144.0,
                    (next() % 7) as f64 / 6.0,
                    (next() % 2) as f64,
                    lag1,
                    (next() % 2) as f64,
                    (next() % 2) as f64,
                ];
                (x, lag1)
            })
            .collect();
        let model = logistic_fit(&data, &LogisticHyperparams::default()).unwrap();
        let correct = data
            .iter()
            .filter(|(x, y)| ((logistic_predict(&model, x) >= 0.5) as u8) as f64 == *y)
            .count();
        assert_eq!(correct, data.len(), "training accuracy should be 1.0");
    }

    #[test]
    fn walk_forward_echo_behaviour() {
        // A model dominated by the y_{t-1} weight keeps repeating the last
        // state: history ending in 1 gives k ones.
        let model = LogisticModel { weights: [0.0, 0.0, 0.0, 100.0, 0.0, 0.0], intercept: -50.0 };
        let mut states = vec![0u8; 144];
        states[141] = 1;
        states[142] = 1;
        states[143] = 1;
        let s = series(states);
        let pred = walk_forward_predict(&model, &s, 144, 6, 0.5).unwrap();
        assert_eq!(pred, vec![1; 6]);
    }

    #[test]
    fn k1_equals_direct_prediction() {
        let states: Vec<u8> = (0..288).map(|i| ((i * 31) % 7 == 0) as u8).collect();
        let s = series(states);
        let data = build_logistic_dataset(&s).unwrap();
        let model = logistic_fit(&data, &LogisticHyperparams { iterations: 100, ..Default::default() }).unwrap();
        for t in [3usize, 50, 143, 200] {
            let direct = (logistic_predict(&model, &logistic_features(&s, t).unwrap()) >= 0.5) as u8;
            let walked = walk_forward_predict(&model, &s, t, 1, 0.5).unwrap();
            assert_eq!(walked, vec![direct]);
        }
    }

    #[test]
    fn walk_forward_crosses_midnight() {
        // Start near the end of Monday and walk into Tuesday: the slot index
        // wraps to 1 and the day of week advances.
        let s = series(vec![0u8; 288]);
        assert_eq!(s.slot_of_day(143), 144);
        assert_eq!(s.slot_of_day(144), 1);
        assert_eq!(s.day_of_week(143), 1);
        assert_eq!(s.day_of_week(144), 2);
        // The forecast itself just needs to run across the boundary.
        let model = LogisticModel { weights: [0.0; 6], intercept: -1.0 };
        let pred = walk_forward_predict(&model, &s, 142, 5, 0.5).unwrap();
        assert_eq!(pred.len(), 5);
    }

    #[test]
    fn insufficient_history_is_an_error() {
        let s = series(vec![0u8; 144]);
        assert!(walk_forward_predict(&LogisticModel { weights: [0.0; 6], intercept: 0.0 }, &s, 2, 3, 0.5).is_err());
        assert!(logistic_features(&s, 1).is_err());
    }
}
