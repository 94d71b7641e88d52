//! Duration-outlier removal.
//!
//! A session is an outlier iff its duration exceeds
//! median(durations) + 3 * SD(durations), where both statistics are computed
//! once over the full input and SD is the population standard deviation.
//! Only the upper side is trimmed. Callers apply this per charger class.

use super::session::ChargingSession;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct OutlierSplit {
    pub kept: Vec<ChargingSession>,
    pub removed: Vec<ChargingSession>,
    pub median_minutes: f64,
    pub sd_minutes: f64,
    pub threshold_minutes: f64,
}

impl OutlierSplit {
    pub fn removed_fraction(&self) -> f64 {
        let total = self.kept.len() + self.removed.len();
        self.removed.len() as f64 / total as f64
    }
}

pub fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

pub fn population_sd(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    var.sqrt()
}

pub fn remove_outliers(sessions: Vec<ChargingSession>) -> Result<OutlierSplit> {
    if sessions.is_empty() {
        return Err(Error::NoSessions);
    }
    let durations: Vec<f64> = sessions.iter().map(|s| s.duration_minutes()).collect();
    let mut sorted = durations.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_minutes = median(&sorted);
    let sd_minutes = population_sd(&durations);
    let threshold_minutes = median_minutes + 3.0 * sd_minutes;

    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for (session, duration) in sessions.into_iter().zip(durations) {
        if duration > threshold_minutes {
            removed.push(session);
        } else {
            kept.push(session);
        }
    }
    Ok(OutlierSplit { kept, removed, median_minutes, sd_minutes, threshold_minutes })
}
