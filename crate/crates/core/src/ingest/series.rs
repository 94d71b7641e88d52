//! Binary occupancy series at a fixed slot width.
//!
//! A series anchors its first state to a calendar date (and, after a
//! temporal split, to a slot within that date), so time-of-day and
//! day-of-week features derive from the index alone. Slot numbering inside a
//! day is 1-based: slot t covers the half-open interval
//! [(t-1)*delta, t*delta) minutes past midnight.

use std::io::{Read, Write};

use chrono::{Datelike, Days, NaiveDate, NaiveDateTime};

use super::session::ChargingSession;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancySeries {
    pub charger_id: String,
    pub start_date: NaiveDate,
    /// Slots past midnight of `start_date` at index 0 (0 for a full-day series).
    start_offset: usize,
    pub delta_minutes: u32,
    states: Vec<u8>,
}

impl OccupancySeries {
    /// A series that starts at midnight and covers whole days.
    pub fn new(
        charger_id: impl Into<String>,
        start_date: NaiveDate,
        delta_minutes: u32,
        states: Vec<u8>,
    ) -> Result<Self> {
        let series = Self::with_offset(charger_id, start_date, 0, delta_minutes, states)?;
        if series.states.len() % series.slots_per_day() != 0 {
            return Err(Error::Config(format!(
                "full-day series length {} is not a multiple of {} slots per day",
                series.states.len(),
                series.slots_per_day()
            )));
        }
        Ok(series)
    }

    pub(crate) fn with_offset(
        charger_id: impl Into<String>,
        start_date: NaiveDate,
        start_offset: usize,
        delta_minutes: u32,
        states: Vec<u8>,
    ) -> Result<Self> {
        if delta_minutes == 0 || 1440 % delta_minutes != 0 {
            return Err(Error::Config(format!("delta_minutes {delta_minutes} must divide 1440")));
        }
        if let Some(bad) = states.iter().find(|&&s| s > 1) {
            return Err(Error::Config(format!("occupancy state {bad} is not binary")));
        }
        let slots_per_day = (1440 / delta_minutes) as usize;
        if start_offset >= slots_per_day {
            return Err(Error::Config(format!(
                "start_offset {start_offset} exceeds {slots_per_day} slots per day"
            )));
        }
        Ok(Self { charger_id: charger_id.into(), start_date, start_offset, delta_minutes, states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[u8] {
        &self.states
    }

    pub fn state(&self, index: usize) -> u8 {
        self.states[index]
    }

    pub fn slots_per_day(&self) -> usize {
        (1440 / self.delta_minutes) as usize
    }

    fn absolute_slot(&self, index: usize) -> usize {
        self.start_offset + index
    }

    /// 1-based slot within the day; valid for any index, including past the
    /// end of the stored states (prediction steps use future calendar slots).
    pub fn slot_of_day(&self, index: usize) -> usize {
        self.absolute_slot(index) % self.slots_per_day() + 1
    }

    /// Whole days since the series start date at this index.
    pub fn day_index(&self, index: usize) -> usize {
        self.absolute_slot(index) / self.slots_per_day()
    }

    pub fn date_of(&self, index: usize) -> NaiveDate {
        self.start_date + Days::new(self.day_index(index) as u64)
    }

    /// Day of week encoded Sunday=0 .. Saturday=6.
    pub fn day_of_week(&self, index: usize) -> u32 {
        self.date_of(index).weekday().num_days_from_sunday()
    }

    pub fn is_weekend(&self, index: usize) -> bool {
        let dow = self.day_of_week(index);
        dow == 0 || dow == 6
    }

    /// Start of the slot at this index.
    pub fn timestamp_of(&self, index: usize) -> NaiveDateTime {
        let minutes = (self.absolute_slot(index) % self.slots_per_day()) as u32 * self.delta_minutes;
        self.date_of(index)
            .and_hms_opt(minutes / 60, minutes % 60, 0)
            .expect("slot minutes are within a day")
    }

    /// Occupancy rate over the whole series.
    pub fn occupancy_rate(&self) -> f64 {
        if self.states.is_empty() {
            return 0.0;
        }
        self.states.iter().map(|&s| s as usize).sum::<usize>() as f64 / self.states.len() as f64
    }

    /// The chronological tail split at `at`: (first `at` states, remainder).
    pub(crate) fn split_at(&self, at: usize) -> (OccupancySeries, OccupancySeries) {
        let spd = self.slots_per_day();
        let train = OccupancySeries {
            charger_id: self.charger_id.clone(),
            start_date: self.start_date,
            start_offset: self.start_offset,
            delta_minutes: self.delta_minutes,
            states: self.states[..at].to_vec(),
        };
        let test = OccupancySeries {
            charger_id: self.charger_id.clone(),
            start_date: self.start_date + Days::new(((self.start_offset + at) / spd) as u64),
            start_offset: (self.start_offset + at) % spd,
            delta_minutes: self.delta_minutes,
            states: self.states[at..].to_vec(),
        };
        (train, test)
    }
}

/// Discretizes sessions of one charger into a binary series over
/// [start_date, start_date + days). A slot is occupied iff some session
/// overlaps it with positive length; half-open slot intervals, so a session
/// ending exactly on a boundary does not claim the next slot.
pub fn discretize(
    sessions: &[ChargingSession],
    charger_id: &str,
    start_date: NaiveDate,
    days: usize,
    delta_minutes: u32,
) -> Result<OccupancySeries> {
    if delta_minutes == 0 || 1440 % delta_minutes != 0 {
        return Err(Error::Config(format!("delta_minutes {delta_minutes} must divide 1440")));
    }
    let slots_per_day = (1440 / delta_minutes) as usize;
    let total_slots = days * slots_per_day;
    let slot_seconds = delta_minutes as i64 * 60;
    let range_start = start_date.and_hms_opt(0, 0, 0).unwrap();
    let range_end = range_start + chrono::Duration::days(days as i64);

    let mut states = vec![0u8; total_slots];
    for session in sessions.iter().filter(|s| s.charger_id == charger_id) {
        if session.plug_in < range_start || session.plug_out > range_end {
            return Err(Error::SessionOutOfRange(format!(
                "{} {}..{} not within {}..{}",
                session.charger_id, session.plug_in, session.plug_out, range_start, range_end
            )));
        }
        let start_s = (session.plug_in - range_start).num_seconds();
        let end_s = (session.plug_out - range_start).num_seconds();
        let first = (start_s / slot_seconds) as usize;
        let last = ((end_s - 1) / slot_seconds) as usize;
        states[first..=last.min(total_slots - 1)].fill(1);
    }
    OccupancySeries::new(charger_id, start_date, delta_minutes, states)
}

/// Writes series as CSV with columns charger_id,timestamp_slot_start,state.
pub fn write_occupancy_csv<W: Write>(writer: W, series_list: &[&OccupancySeries]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["charger_id", "timestamp_slot_start", "state"])?;
    for series in series_list {
        for i in 0..series.len() {
            w.write_record([
                series.charger_id.as_str(),
                &series.timestamp_of(i).format("%Y-%m-%dT%H:%M").to_string(),
                if series.state(i) == 1 { "1" } else { "0" },
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads series back from the occupancy CSV. Rows of one charger must be
/// contiguous and spaced exactly one slot apart.
pub fn read_occupancy_csv<R: Read>(reader: R) -> Result<Vec<OccupancySeries>> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let headers = csv_reader.headers()?.clone();
    let expect = ["charger_id", "timestamp_slot_start", "state"];
    if headers.iter().map(str::trim).ne(expect) {
        return Err(Error::Config(format!(
            "occupancy csv header must be {expect:?}, got {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }

    struct Block {
        charger_id: String,
        first: NaiveDateTime,
        last: NaiveDateTime,
        states: Vec<u8>,
    }
    let mut blocks: Vec<Block> = Vec::new();

    for record in csv_reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let charger_id = record.get(0).unwrap_or("").trim().to_string();
        let raw_ts = record.get(1).unwrap_or("").trim().to_string();
        let ts = super::session::parse_timestamp(&raw_ts)
            .ok_or_else(|| Error::Config(format!("line {line}: bad timestamp '{raw_ts}'")))?;
        let state: u8 = match record.get(2).unwrap_or("").trim() {
            "0" => 0,
            "1" => 1,
            other => return Err(Error::Config(format!("line {line}: state '{other}' is not 0/1"))),
        };

        match blocks.last_mut() {
            Some(block) if block.charger_id == charger_id => {
                block.last = ts;
                block.states.push(state);
            }
            _ => {
                if blocks.iter().any(|b| b.charger_id == charger_id) {
                    return Err(Error::Config(format!(
                        "line {line}: charger '{charger_id}' appears in more than one block"
                    )));
                }
                blocks.push(Block { charger_id, first: ts, last: ts, states: vec![state] });
            }
        }
    }

    let mut out = Vec::with_capacity(blocks.len());
    for block in blocks {
        let span_minutes = (block.last - block.first).num_minutes();
        if block.states.len() > 1 {
            let per_slot = span_minutes / (block.states.len() as i64 - 1);
            if per_slot <= 0 || 1440 % per_slot != 0 || span_minutes % per_slot != 0 {
                return Err(Error::Config(format!(
                    "charger '{}': slot spacing is not uniform",
                    block.charger_id
                )));
            }
            let delta = per_slot as u32;
            let midnight_minutes =
                block.first.time().signed_duration_since(chrono::NaiveTime::MIN).num_minutes();
            if midnight_minutes % per_slot != 0 {
                return Err(Error::Config(format!(
                    "charger '{}': first timestamp is not on a slot boundary",
                    block.charger_id
                )));
            }
            let offset = (midnight_minutes / per_slot) as usize;
            out.push(OccupancySeries::with_offset(
                block.charger_id,
                block.first.date(),
                offset,
                delta,
                block.states,
            )?);
        } else {
            return Err(Error::Config(format!(
                "charger '{}': a single-row series is too short to infer the slot width",
                block.charger_id
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::session::ChargerClass;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn session(id: &str, start: (u32, u32), end: (u32, u32)) -> ChargingSession {
        let day = date(2018, 3, 5);
        ChargingSession {
            charger_id: id.to_string(),
            plug_in: day.and_hms_opt(start.0, start.1, 0).unwrap(),
            plug_out: day.and_hms_opt(end.0, end.1, 0).unwrap(),
            energy_kwh: 1.0,
            charger_class: ChargerClass::Rapid,
        }
    }

    #[test]
    fn session_marks_overlapped_slots() {
        // 10:05-10:25 overlaps [10:00,10:10), [10:10,10:20), [10:20,10:30).
        let series =
            discretize(&[session("CP001", (10, 5), (10, 25))], "CP001", date(2018, 3, 5), 1, 10).unwrap();
        assert_eq!(series.len(), 144);
        let base = 60; // slot index of 10:00
        assert_eq!(&series.states()[base - 1..base + 4], &[0, 1, 1, 1, 0]);
    }

    #[test]
    fn exact_boundary_does_not_leak() {
        // 10:00-10:10 exactly: only [10:00,10:10) is occupied.
        let series =
            discretize(&[session("CP001", (10, 0), (10, 10))], "CP001", date(2018, 3, 5), 1, 10).unwrap();
        let base = 60;
        assert_eq!(series.state(base), 1);
        assert_eq!(series.state(base + 1), 0);
    }

    #[test]
    fn empty_day_is_all_zeros() {
        let series = discretize(&[], "CP001", date(2018, 3, 5), 1, 10).unwrap();
        assert_eq!(series.states(), vec![0u8; 144].as_slice());
    }

    #[test]
    fn session_outside_range_is_an_error() {
        let err = discretize(&[session("CP001", (10, 0), (10, 30))], "CP001", date(2018, 3, 6), 1, 10);
        assert!(matches!(err, Err(Error::SessionOutOfRange(_))));
    }

    #[test]
    fn other_chargers_are_ignored() {
        let series =
            discretize(&[session("CP002", (10, 0), (10, 30))], "CP001", date(2018, 3, 5), 1, 10).unwrap();
        assert!(series.states().iter().all(|&s| s == 0));
    }

    #[test]
    fn every_session_minute_lands_in_an_occupied_slot() {
        let sessions = vec![
            session("CP001", (0, 0), (1, 7)),
            session("CP001", (9, 59), (10, 1)),
            session("CP001", (23, 30), (23, 59)),
        ];
        let series = discretize(&sessions, "CP001", date(2018, 3, 5), 1, 10).unwrap();
        for s in &sessions {
            let start = (s.plug_in - date(2018, 3, 5).and_hms_opt(0, 0, 0).unwrap()).num_minutes();
            let end = (s.plug_out - date(2018, 3, 5).and_hms_opt(0, 0, 0).unwrap()).num_minutes();
            for minute in start..end {
                let slot = (minute / 10) as usize;
                assert_eq!(series.state(slot), 1, "minute {minute} not covered");
            }
        }
    }

    #[test]
    fn calendar_accessors() {
        // 2018-03-05 is a Monday.
        let series = OccupancySeries::new("CP001", date(2018, 3, 5), 10, vec![0; 144 * 7]).unwrap();
        assert_eq!(series.slot_of_day(0), 1);
        assert_eq!(series.slot_of_day(143), 144);
        assert_eq!(series.slot_of_day(144), 1);
        assert_eq!(series.day_index(144), 1);
        assert_eq!(series.day_of_week(0), 1); // Monday = 1
        assert!(!series.is_weekend(0));
        assert!(series.is_weekend(5 * 144)); // Saturday
        assert!(series.is_weekend(6 * 144)); // Sunday
        assert_eq!(series.timestamp_of(61).format("%Y-%m-%dT%H:%M").to_string(), "2018-03-05T10:10");
        // Accessors extend past the stored states.
        assert_eq!(series.slot_of_day(144 * 7), 1);
        assert_eq!(series.day_of_week(144 * 7), 1);
    }

    #[test]
    fn non_binary_state_is_rejected() {
        assert!(OccupancySeries::new("x", date(2018, 3, 5), 10, vec![0, 2, 1]).is_err());
    }

    #[test]
    fn partial_day_full_series_is_rejected() {
        assert!(OccupancySeries::new("x", date(2018, 3, 5), 10, vec![0; 100]).is_err());
    }

    #[test]
    fn occupancy_csv_round_trip() {
        let mut states = vec![0u8; 288];
        states[10] = 1;
        states[200] = 1;
        let a = OccupancySeries::new("CP001", date(2018, 3, 5), 10, states).unwrap();
        let b = OccupancySeries::new("CP002", date(2018, 3, 5), 10, vec![1; 144]).unwrap();

        let mut buf = Vec::new();
        write_occupancy_csv(&mut buf, &[&a, &b]).unwrap();
        let read = read_occupancy_csv(buf.as_slice()).unwrap();
        assert_eq!(read.len(), 2);
        assert_eq!(read[0], a);
        assert_eq!(read[1], b);
    }

    #[test]
    fn split_then_write_read_preserves_offset() {
        let series = OccupancySeries::new("CP001", date(2018, 3, 5), 10, vec![0; 288]).unwrap();
        let (_, test) = series.split_at(200);
        assert_eq!(test.slot_of_day(0), 57); // slot 200 -> day 1, slot 56 (0-based) -> 57
        assert_eq!(test.date_of(0), date(2018, 3, 6));
        let mut buf = Vec::new();
        write_occupancy_csv(&mut buf, &[&test]).unwrap();
        let read = read_occupancy_csv(buf.as_slice()).unwrap();
        assert_eq!(read[0], test);
    }
}
