//! Session ingestion: CSV parsing, outlier removal, discretization into
//! occupancy series, and the temporal train/test split.

pub mod outliers;
pub mod series;
pub mod session;

pub use outliers::{remove_outliers, OutlierSplit};
pub use series::{discretize, read_occupancy_csv, write_occupancy_csv, OccupancySeries};
pub use session::{parse_sessions, ChargerClass, ChargingSession, ColumnMap, ParseOutcome, RejectedRow};

use crate::error::{Error, Result};

/// A chronological split: `train` holds the first floor(fraction * len)
/// states, `test` the remainder, both calendar-anchored.
#[derive(Debug, Clone)]
pub struct SplitSeries {
    pub train: OccupancySeries,
    pub test: OccupancySeries,
    pub split_fraction: f64,
}

impl SplitSeries {
    pub fn train_len(&self) -> usize {
        self.train.len()
    }
}

pub fn split_train_test(series: &OccupancySeries, fraction: f64) -> Result<SplitSeries> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Config(format!("split fraction must be in (0, 1), got {fraction}")));
    }
    if series.is_empty() {
        return Err(Error::SeriesTooShort { len: 0, needed: 1 });
    }
    let train_len = (fraction * series.len() as f64).floor() as usize;
    let (train, test) = series.split_at(train_len);
    Ok(SplitSeries { train, test, split_fraction: fraction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn series_of_len(len_days: usize) -> OccupancySeries {
        let states: Vec<u8> = (0..len_days * 144).map(|i| (i % 3 == 0) as u8).collect();
        OccupancySeries::new("CP001", NaiveDate::from_ymd_opt(2018, 3, 5).unwrap(), 10, states).unwrap()
    }

    #[test]
    fn seventy_thirty_on_round_length() {
        // 1000 slots is not a full-day series; emulate with split math on 91 days.
        let series = series_of_len(91);
        assert_eq!(series.len(), 13104);
        let split = split_train_test(&series, 0.7).unwrap();
        assert_eq!(split.train.len(), 9172);
        assert_eq!(split.test.len(), 3932);
    }

    #[test]
    fn floor_arithmetic_on_simple_length() {
        let series = series_of_len(10);
        let split = split_train_test(&series, 0.7).unwrap();
        assert_eq!(split.train.len(), (0.7f64 * 1440.0).floor() as usize);
        assert_eq!(split.train.len() + split.test.len(), series.len());
    }

    #[test]
    fn out_of_range_fraction_is_an_error() {
        let series = series_of_len(2);
        assert!(split_train_test(&series, 1.0).is_err());
        assert!(split_train_test(&series, 0.0).is_err());
        assert!(split_train_test(&series, -0.5).is_err());
    }

    #[test]
    fn concatenation_reconstructs_the_series() {
        let series = series_of_len(7);
        let split = split_train_test(&series, 0.37).unwrap();
        let mut joined = split.train.states().to_vec();
        joined.extend_from_slice(split.test.states());
        assert_eq!(joined, series.states());
    }

    #[test]
    fn test_piece_keeps_calendar_anchoring() {
        let series = series_of_len(7);
        let split = split_train_test(&series, 0.5).unwrap();
        let n = split.train.len();
        for offset in [0usize, 1, 143, 200] {
            assert_eq!(split.test.slot_of_day(offset), series.slot_of_day(n + offset));
            assert_eq!(split.test.day_of_week(offset), series.day_of_week(n + offset));
        }
    }
}
