//! Rolling multistep evaluation over the test split.
//!
//! Every admissible window start t in the test region is scored at stride 1
//! against the true observed future. The forecaster always receives the true
//! observed history before t (walk-forward baselines feed back their own
//! predictions only inside a window). Boundary rule: the first test windows
//! may draw their history from the tail of the training split, so the
//! window starts are test_start ..= len - k and the window count is
//! test_len - k + 1. No test target ever leaks into an input.

use crate::error::{Error, Result};
use crate::features::DayTypeProfiles;
use crate::ingest::OccupancySeries;
use crate::models::Forecaster;

use super::metrics::window_score;

/// Scores from a single trained model over all test windows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunScore {
    pub seed: u64,
    pub accuracy: f64,
    pub f1: f64,
    pub windows: usize,
}

/// Per (charger, horizon) aggregate over repeated training runs.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonReport {
    pub charger_id: String,
    pub k: usize,
    pub runs: Vec<RunScore>,
    pub mean_accuracy: f64,
    pub mean_f1: f64,
}

impl HorizonReport {
    pub fn from_runs(charger_id: String, k: usize, runs: Vec<RunScore>) -> Self {
        let n = runs.len() as f64;
        let mean_accuracy = runs.iter().map(|r| r.accuracy).sum::<f64>() / n;
        let mean_f1 = runs.iter().map(|r| r.f1).sum::<f64>() / n;
        Self { charger_id, k, runs, mean_accuracy, mean_f1 }
    }
}

/// Mean window accuracy and F1 of one forecaster over every admissible test
/// window; also returns the window count.
pub fn score_windows(
    forecaster: &dyn Forecaster,
    series: &OccupancySeries,
    profiles: &DayTypeProfiles,
    test_start: usize,
    k: usize,
) -> Result<(f64, f64, usize)> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".to_string()));
    }
    if test_start + k > series.len() {
        return Err(Error::NoWindows(format!(
            "test split of length {} cannot fit a {k}-step window",
            series.len().saturating_sub(test_start)
        )));
    }
    let mut acc_sum = 0.0;
    let mut f1_sum = 0.0;
    let mut windows = 0usize;
    for t in test_start..=series.len() - k {
        let pred = forecaster.forecast_window(series, profiles, t, k)?;
        let obs = &series.states()[t..t + k];
        let score = window_score(&pred, obs);
        acc_sum += score.accuracy;
        f1_sum += score.f1;
        windows += 1;
    }
    Ok((acc_sum / windows as f64, f1_sum / windows as f64, windows))
}

/// Trains one forecaster per seed and scores each over the test windows;
/// the report means average the per-run means.
pub fn rolling_evaluate<F>(
    series: &OccupancySeries,
    profiles: &DayTypeProfiles,
    test_start: usize,
    k: usize,
    seeds: &[u64],
    mut train_fn: F,
) -> Result<HorizonReport>
where
    F: FnMut(u64) -> Result<Box<dyn Forecaster>>,
{
    if seeds.is_empty() {
        return Err(Error::Config("at least one run seed is required".to_string()));
    }
    let mut runs = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let forecaster = train_fn(seed)?;
        let (accuracy, f1, windows) = score_windows(forecaster.as_ref(), series, profiles, test_start, k)?;
        runs.push(RunScore { seed, accuracy, f1, windows });
    }
    Ok(HorizonReport::from_runs(series.charger_id.clone(), k, runs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    /// Echoes the true future: accuracy 1, F1 1 wherever positives exist.
    struct OracleForecaster;

    impl Forecaster for OracleForecaster {
        fn forecast_window(
            &self,
            series: &OccupancySeries,
            _profiles: &DayTypeProfiles,
            t: usize,
            k: usize,
        ) -> Result<Vec<u8>> {
            Ok(series.states()[t..t + k].to_vec())
        }
    }

    struct ConstantForecaster(u8);

    impl Forecaster for ConstantForecaster {
        fn forecast_window(
            &self,
            _series: &OccupancySeries,
            _profiles: &DayTypeProfiles,
            _t: usize,
            k: usize,
        ) -> Result<Vec<u8>> {
            Ok(vec![self.0; k])
        }
    }

    fn series(states: Vec<u8>) -> OccupancySeries {
        let mut padded = states;
        let rem = padded.len() % 144;
        if rem != 0 {
            padded.extend(std::iter::repeat_n(0u8, 144 - rem));
        }
        OccupancySeries::new("CP001", NaiveDate::from_ymd_opt(2018, 3, 5).unwrap(), 10, padded).unwrap()
    }

    fn profiles() -> DayTypeProfiles {
        DayTypeProfiles { weekday: vec![0.0; 144], weekend: vec![0.0; 144], source: "t".to_string() }
    }

    #[test]
    fn oracle_scores_one() {
        let s = series((0..288).map(|i| (i % 5 == 0) as u8).collect());
        let (acc, f1, _) = score_windows(&OracleForecaster, &s, &profiles(), 200, 6).unwrap();
        assert_eq!(acc, 1.0);
        assert!(f1 > 0.0);
    }

    #[test]
    fn constant_zero_on_zero_series() {
        let s = series(vec![0u8; 288]);
        let (acc, f1, _) = score_windows(&ConstantForecaster(0), &s, &profiles(), 250, 3).unwrap();
        assert_eq!(acc, 1.0);
        assert_eq!(f1, 0.0); // zero-division rule
    }

    #[test]
    fn window_count_covers_train_tail_history() {
        let s = series(vec![0u8; 288]);
        let test_start = 200;
        let k = 6;
        let (_, _, windows) = score_windows(&ConstantForecaster(0), &s, &profiles(), test_start, k).unwrap();
        let test_len = s.len() - test_start;
        assert_eq!(windows, test_len - k + 1);
    }

    #[test]
    fn matches_independent_window_enumeration() {
        let s = series((0..432).map(|i| ((i * 13) % 7 < 3) as u8).collect());
        let p = profiles();
        let test_start = 300;
        let k = 4;
        let fc = ConstantForecaster(1);
        let (acc, f1, windows) = score_windows(&fc, &s, &p, test_start, k).unwrap();

        // Brute force: enumerate every window independently.
        let mut accs = Vec::new();
        let mut f1s = Vec::new();
        let mut t = test_start;
        while t + k <= s.len() {
            let pred = vec![1u8; k];
            let obs = &s.states()[t..t + k];
            let score = crate::eval::metrics::window_score(&pred, obs);
            accs.push(score.accuracy);
            f1s.push(score.f1);
            t += 1;
        }
        assert_eq!(windows, accs.len());
        let mean_acc = accs.iter().sum::<f64>() / accs.len() as f64;
        let mean_f1 = f1s.iter().sum::<f64>() / f1s.len() as f64;
        assert!((acc - mean_acc).abs() < 1e-15);
        assert!((f1 - mean_f1).abs() < 1e-15);
    }

    #[test]
    fn too_short_test_region_is_an_error() {
        let s = series(vec![0u8; 144]);
        assert!(matches!(
            score_windows(&ConstantForecaster(0), &s, &profiles(), 142, 6),
            Err(Error::NoWindows(_))
        ));
    }

    #[test]
    fn report_means_average_run_means() {
        let s = series((0..288).map(|i| (i % 2) as u8).collect());
        let p = profiles();
        let mut flip = false;
        let report = rolling_evaluate(&s, &p, 280, 2, &[1, 2], |seed| {
            flip = !flip;
            let _ = seed;
            Ok(Box::new(ConstantForecaster(flip as u8)) as Box<dyn Forecaster>)
        })
        .unwrap();
        assert_eq!(report.runs.len(), 2);
        let expected = (report.runs[0].accuracy + report.runs[1].accuracy) / 2.0;
        assert!((report.mean_accuracy - expected).abs() < 1e-15);
    }
}
