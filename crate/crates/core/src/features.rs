//! Day-type tendency profiles and per-step sample assembly.
//!
//! A sample at step t carries:
//! - `x1`: the m most recent states, most recent first (y_{t-1} .. y_{t-m});
//! - `x2`: slot-of-day scaled by slots-per-day, day-of-week scaled by 6, the
//!   weekend flag, then the day-type mean occupancy profile of the step's
//!   day (147 values at the default 10-minute slot width);
//! - `y`: the k target states y_t .. y_{t+k-1}.
//!
//! Profiles come from the training split only.

use std::io::Write;

use crate::error::{Error, Result};
use crate::ingest::OccupancySeries;

/// Mean occupancy per slot, one curve for weekdays and one for weekends.
#[derive(Debug, Clone, PartialEq)]
pub struct DayTypeProfiles {
    pub weekday: Vec<f64>,
    pub weekend: Vec<f64>,
    /// Charger id plus the training range the means were computed from.
    pub source: String,
}

impl DayTypeProfiles {
    pub fn slots_per_day(&self) -> usize {
        self.weekday.len()
    }

    pub fn for_day_type(&self, weekend: bool) -> &[f64] {
        if weekend {
            &self.weekend
        } else {
            &self.weekday
        }
    }
}

/// Per-slot mean of the binary states over the training split, split by day
/// type. Every (day type, slot) pair must occur at least once.
pub fn day_type_profile(train: &OccupancySeries) -> Result<DayTypeProfiles> {
    let spd = train.slots_per_day();
    let mut sums = [vec![0.0f64; spd], vec![0.0f64; spd]];
    let mut counts = [vec![0usize; spd], vec![0usize; spd]];
    for i in 0..train.len() {
        let ty = train.is_weekend(i) as usize;
        let slot = train.slot_of_day(i) - 1;
        sums[ty][slot] += train.state(i) as f64;
        counts[ty][slot] += 1;
    }
    for (ty, name) in [(0usize, "weekday"), (1usize, "weekend")] {
        if let Some(slot) = counts[ty].iter().position(|&c| c == 0) {
            return Err(Error::DayTypeCoverage(format!(
                "training split has no {} occurrence of slot {}",
                name,
                slot + 1
            )));
        }
    }
    let mean = |ty: usize| -> Vec<f64> {
        sums[ty].iter().zip(&counts[ty]).map(|(s, &c)| s / c as f64).collect()
    };
    Ok(DayTypeProfiles {
        weekday: mean(0),
        weekend: mean(1),
        source: format!(
            "{} {}..{}",
            train.charger_id,
            train.timestamp_of(0).format("%Y-%m-%dT%H:%M"),
            train.timestamp_of(train.len() - 1).format("%Y-%m-%dT%H:%M"),
        ),
    })
}

/// One training/evaluation instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// y_{t-1} .. y_{t-m}, most recent first.
    pub x1: Vec<f64>,
    /// slot/spd, dow/6, weekend flag, then the day-type profile.
    pub x2: Vec<f64>,
    /// y_t .. y_{t+k-1}.
    pub y: Vec<f64>,
    pub origin_charger: String,
    pub origin_step: usize,
}

/// The x1/x2 feature pair for step t without targets; t may equal the series
/// length (forecasting just past the end of the data).
pub fn build_inference_features(
    series: &OccupancySeries,
    profiles: &DayTypeProfiles,
    t: usize,
    m: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if t < m {
        return Err(Error::SampleBounds(format!(
            "step {t} needs {m} history states but the series starts at 0"
        )));
    }
    if t > series.len() {
        return Err(Error::SampleBounds(format!(
            "step {t} lies past the series end {}",
            series.len()
        )));
    }
    if profiles.slots_per_day() != series.slots_per_day() {
        return Err(Error::DimMismatch(format!(
            "profiles cover {} slots per day, series has {}",
            profiles.slots_per_day(),
            series.slots_per_day()
        )));
    }
    let x1: Vec<f64> = (1..=m).map(|back| series.state(t - back) as f64).collect();
    let spd = series.slots_per_day();
    let weekend = series.is_weekend(t);
    let mut x2 = Vec::with_capacity(3 + spd);
    x2.push(series.slot_of_day(t) as f64 / spd as f64);
    x2.push(series.day_of_week(t) as f64 / 6.0);
    x2.push(if weekend { 1.0 } else { 0.0 });
    x2.extend_from_slice(profiles.for_day_type(weekend));
    Ok((x1, x2))
}

pub fn build_sample(
    series: &OccupancySeries,
    profiles: &DayTypeProfiles,
    t: usize,
    m: usize,
    k: usize,
) -> Result<Sample> {
    if t + k > series.len() {
        return Err(Error::SampleBounds(format!(
            "step {t} with horizon {k} exceeds the series end {}",
            series.len()
        )));
    }
    let (x1, x2) = build_inference_features(series, profiles, t, m)?;
    let y: Vec<f64> = (0..k).map(|j| series.state(t + j) as f64).collect();
    Ok(Sample { x1, x2, y, origin_charger: series.charger_id.clone(), origin_step: t })
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub m: usize,
    pub k: usize,
}

/// One sample per admissible step, stride 1, chronological:
/// len - m - k + 1 samples.
pub fn build_dataset(
    series: &OccupancySeries,
    profiles: &DayTypeProfiles,
    m: usize,
    k: usize,
) -> Result<Dataset> {
    if series.len() < m + k {
        return Err(Error::SeriesTooShort { len: series.len(), needed: m + k });
    }
    let samples = (m..=series.len() - k)
        .map(|t| build_sample(series, profiles, t, m, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset { samples, m, k })
}

/// Writes the profile CSV: slot,weekday_rate,weekend_rate.
pub fn write_profiles_csv<W: Write>(writer: W, profiles: &DayTypeProfiles) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["slot", "weekday_rate", "weekend_rate"])?;
    for slot in 0..profiles.slots_per_day() {
        w.write_record([
            (slot + 1).to_string(),
            format!("{:.6}", profiles.weekday[slot]),
            format!("{:.6}", profiles.weekend[slot]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn monday() -> NaiveDate {
        NaiveDate::from_ymd_opt(2018, 3, 5).unwrap()
    }

    /// 2018-03-05 (Monday) onward: one full week.
    fn week_series(state_fn: impl Fn(usize) -> u8) -> OccupancySeries {
        let states: Vec<u8> = (0..7 * 144).map(state_fn).collect();
        OccupancySeries::new("CP001", monday(), 10, states).unwrap()
    }

    #[test]
    fn weekend_occupied_weekday_free() {
        let series = week_series(|i| ((i / 144) >= 5) as u8); // Sat+Sun occupied
        let profiles = day_type_profile(&series).unwrap();
        assert!(profiles.weekday.iter().all(|&v| v == 0.0));
        assert!(profiles.weekend.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn alternating_weekday_profile() {
        // Weekdays alternate 1,0,1,0..; weekend all zero.
        let series = week_series(|i| if (i / 144) < 5 { (i % 2 == 0) as u8 } else { 0 });
        let profiles = day_type_profile(&series).unwrap();
        for slot in 0..144 {
            let expected = if slot % 2 == 0 { 1.0 } else { 0.0 };
            assert_eq!(profiles.weekday[slot], expected);
        }
    }

    #[test]
    fn missing_day_type_is_an_error() {
        // Five weekdays only.
        let states = vec![0u8; 5 * 144];
        let series = OccupancySeries::new("CP001", monday(), 10, states).unwrap();
        assert!(matches!(day_type_profile(&series), Err(Error::DayTypeCoverage(_))));
    }

    #[test]
    fn profile_matches_brute_force_means() {
        let series = week_series(|i| ((i * 7 + i / 13) % 3 == 0) as u8);
        let profiles = day_type_profile(&series).unwrap();
        // Independent enumeration over the same split.
        for slot in 0..144 {
            for weekend in [false, true] {
                let mut sum = 0.0;
                let mut count = 0usize;
                for i in 0..series.len() {
                    if series.slot_of_day(i) == slot + 1 && series.is_weekend(i) == weekend {
                        sum += series.state(i) as f64;
                        count += 1;
                    }
                }
                let expected = sum / count as f64;
                let got = profiles.for_day_type(weekend)[slot];
                let rel = (got - expected).abs() / expected.abs().max(1.0);
                assert!(rel <= 1e-12);
            }
        }
    }

    fn test_profiles() -> DayTypeProfiles {
        DayTypeProfiles {
            weekday: (0..144).map(|i| i as f64 / 144.0).collect(),
            weekend: (0..144).map(|i| 1.0 - i as f64 / 144.0).collect(),
            source: "test".to_string(),
        }
    }

    #[test]
    fn first_monday_slot_features() {
        let series = week_series(|i| (i % 5 == 0) as u8);
        let profiles = test_profiles();
        let sample = build_sample(&series, &profiles, 12, 12, 3).unwrap();
        // Step 12 is slot 13 of Monday: d = 1/6, w = 0, weekday profile.
        assert!((sample.x2[0] - 13.0 / 144.0).abs() < 1e-15);
        assert!((sample.x2[1] - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(sample.x2[2], 0.0);
        assert_eq!(&sample.x2[3..], profiles.weekday.as_slice());
        assert_eq!(sample.x2.len(), 147);
    }

    #[test]
    fn saturday_selects_weekend_profile() {
        let series = week_series(|_| 0);
        let profiles = test_profiles();
        let t = 5 * 144 + 30; // Saturday
        let sample = build_sample(&series, &profiles, t, 12, 2).unwrap();
        assert_eq!(sample.x2[2], 1.0);
        assert_eq!(&sample.x2[3..], profiles.weekend.as_slice());
    }

    #[test]
    fn history_and_targets_copy_series_states() {
        let series = week_series(|i| ((i / 3) % 2) as u8);
        let profiles = test_profiles();
        let t = 40;
        let (m, k) = (12, 6);
        let sample = build_sample(&series, &profiles, t, m, k).unwrap();
        for back in 1..=m {
            assert_eq!(sample.x1[back - 1], series.state(t - back) as f64);
        }
        for j in 0..k {
            assert_eq!(sample.y[j], series.state(t + j) as f64);
        }
        assert!(sample.x2.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn bounds_violations_are_errors() {
        let series = week_series(|_| 0);
        let profiles = test_profiles();
        assert!(matches!(
            build_sample(&series, &profiles, 5, 12, 3),
            Err(Error::SampleBounds(_))
        ));
        let last = series.len() - 1;
        assert!(matches!(
            build_sample(&series, &profiles, last, 12, 6),
            Err(Error::SampleBounds(_))
        ));
    }

    #[test]
    fn dataset_counts() {
        // Use a 20-step slice semantics on a real series: len = m + k - 1 + extra.
        let series = week_series(|i| (i % 2) as u8);
        let profiles = test_profiles();
        let ds = build_dataset(&series, &profiles, 12, 3).unwrap();
        assert_eq!(ds.samples.len(), series.len() - 12 - 3 + 1);
        // Ordered, stride 1.
        for (idx, s) in ds.samples.iter().enumerate() {
            assert_eq!(s.origin_step, 12 + idx);
        }
    }

    #[test]
    fn minimal_and_too_short_series() {
        // A split piece of exactly m + k states gives one sample.
        let series = week_series(|i| (i % 2) as u8);
        let split = crate::ingest::split_train_test(&series, 15.0 / series.len() as f64).unwrap();
        assert_eq!(split.train.len(), 15);
        let profiles = test_profiles();
        let ds = build_dataset(&split.train, &profiles, 12, 3).unwrap();
        assert_eq!(ds.samples.len(), 1);

        let short = crate::ingest::split_train_test(&series, 14.0 / series.len() as f64).unwrap();
        assert!(matches!(
            build_dataset(&short.train, &profiles, 12, 3),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn profiles_csv_shape() {
        let profiles = test_profiles();
        let mut buf = Vec::new();
        write_profiles_csv(&mut buf, &profiles).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 145);
        assert_eq!(lines[0], "slot,weekday_rate,weekend_rate");
        assert!(lines[1].starts_with("1,0.000000,1.000000"));
    }
}
