//! Synthetic occupancy series for desk-scale experiments.
//!
//! Two modes: a deterministic slot schedule (fixed occupied ranges per day
//! type) or a two-state Markov chain whose transition probabilities depend
//! on the day type of the slot being drawn. Both are seeded and reproducible.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::OccupancySeries;

/// Transition probabilities: p01 = P(next = 1 | current = 0),
/// p10 = P(next = 0 | current = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DayTypeMarkov {
    pub p01: f64,
    pub p10: f64,
}

impl DayTypeMarkov {
    /// Long-run occupancy rate p01 / (p01 + p10).
    pub fn stationary_rate(&self) -> f64 {
        self.p01 / (self.p01 + self.p10)
    }
}

/// Fixed occupied slot ranges, 1-based inclusive within a day.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SlotSchedule {
    pub weekday: Vec<(usize, usize)>,
    pub weekend: Vec<(usize, usize)>,
}

impl SlotSchedule {
    fn occupies(&self, weekend: bool, slot: usize) -> bool {
        let ranges = if weekend { &self.weekend } else { &self.weekday };
        ranges.iter().any(|&(lo, hi)| (lo..=hi).contains(&slot))
    }
}

#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub charger_id: String,
    pub start_date: NaiveDate,
    pub days: usize,
    pub delta_minutes: u32,
    pub weekday: DayTypeMarkov,
    pub weekend: DayTypeMarkov,
    /// When present, states come from the schedule and no randomness is used.
    pub schedule: Option<SlotSchedule>,
    /// Markov state before the first slot.
    pub initial_state: u8,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            charger_id: "SYNTH".to_string(),
            start_date: NaiveDate::from_ymd_opt(2018, 3, 5).unwrap(),
            days: 28,
            delta_minutes: 10,
            weekday: DayTypeMarkov { p01: 0.1, p10: 0.3 },
            weekend: DayTypeMarkov { p01: 0.2, p10: 0.2 },
            schedule: None,
            initial_state: 0,
            seed: 42,
        }
    }
}

impl SynthSpec {
    fn validate(&self) -> Result<()> {
        if self.days == 0 {
            return Err(Error::Config("days must be at least 1".to_string()));
        }
        if self.initial_state > 1 {
            return Err(Error::Config("initial_state must be 0 or 1".to_string()));
        }
        for (name, m) in [("weekday", self.weekday), ("weekend", self.weekend)] {
            if !(0.0..=1.0).contains(&m.p01) || !(0.0..=1.0).contains(&m.p10) {
                return Err(Error::Config(format!(
                    "{name} transition probabilities must be in [0, 1]"
                )));
            }
        }
        if let Some(schedule) = &self.schedule {
            let spd = (1440 / self.delta_minutes.max(1)) as usize;
            for &(lo, hi) in schedule.weekday.iter().chain(&schedule.weekend) {
                if lo == 0 || hi < lo || hi > spd {
                    return Err(Error::Config(format!(
                        "schedule range {lo}-{hi} outside 1..={spd}"
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn synth_generate(spec: &SynthSpec) -> Result<OccupancySeries> {
    spec.validate()?;
    // Probe the calendar with an empty series of the right anchoring.
    let skeleton = OccupancySeries::new(&spec.charger_id, spec.start_date, spec.delta_minutes, Vec::new())?;
    let spd = skeleton.slots_per_day();
    let total = spec.days * spd;
    let mut states = Vec::with_capacity(total);

    match &spec.schedule {
        Some(schedule) => {
            for i in 0..total {
                let weekend = skeleton.is_weekend(i);
                let slot = skeleton.slot_of_day(i);
                states.push(schedule.occupies(weekend, slot) as u8);
            }
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mut current = spec.initial_state;
            for i in 0..total {
                let markov = if skeleton.is_weekend(i) { spec.weekend } else { spec.weekday };
                let u: f64 = rng.random();
                current = match current {
                    0 => (u < markov.p01) as u8,
                    _ => (u >= markov.p10) as u8,
                };
                states.push(current);
            }
        }
    }
    OccupancySeries::new(&spec.charger_id, spec.start_date, spec.delta_minutes, states)
}
