//! Command implementations.

pub mod evaluate;
pub mod ingest;
pub mod predict;
pub mod sweep;
pub mod synth;
pub mod train;

use std::fs::File;

use anyhow::{bail, Context, Result};

use occuforge_core::eval::ChargerData;
use occuforge_core::ingest::read_occupancy_csv;

use crate::config::RunConfig;

/// Reads the occupancy CSV and prepares every charger: temporal split plus
/// training-side day-type profiles. Chargers come back sorted by id.
pub fn load_charger_data(cfg: &RunConfig) -> Result<Vec<ChargerData>> {
    let path = cfg.occupancy_path();
    let file = File::open(&path).with_context(|| {
        format!("cannot open occupancy csv {} (run `occuforge ingest` or `synth` first)", path.display())
    })?;
    let mut series_list = read_occupancy_csv(file)?;
    if series_list.is_empty() {
        bail!("occupancy csv {} contains no series", path.display());
    }
    series_list.sort_by(|a, b| a.charger_id.cmp(&b.charger_id));
    series_list
        .into_iter()
        .map(|series| {
            let id = series.charger_id.clone();
            ChargerData::prepare(series, cfg.split_fraction)
                .with_context(|| format!("preparing charger '{id}'"))
        })
        .collect()
}
