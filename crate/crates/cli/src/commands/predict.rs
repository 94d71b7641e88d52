//! `predict`: load a saved model and emit the k-step forecast for a charger
//! starting at a given timestamp.

use std::path::Path;

use anyhow::{bail, Context, Result};

use occuforge_core::features::build_inference_features;
use occuforge_core::models::threshold_probs;
use occuforge_core::persist::load_model;

use crate::commands::load_charger_data;
use crate::config::RunConfig;

pub fn run(cfg: &RunConfig, model_path: &Path, at: &str) -> Result<()> {
    let saved = load_model(model_path)?;
    let data = load_charger_data(cfg)?;
    let target = data
        .iter()
        .find(|d| d.charger_id == saved.charger_id)
        .with_context(|| {
            format!(
                "charger '{}' (from the model file) not found in {}",
                saved.charger_id,
                cfg.occupancy_path().display()
            )
        })?;

    let ts = occuforge_core::ingest::session::parse_timestamp(at)
        .with_context(|| format!("bad timestamp '{at}' (want YYYY-MM-DDTHH:MM)"))?;
    let series = &target.series;
    let origin = series.timestamp_of(0);
    let minutes = (ts - origin).num_minutes();
    if minutes < 0 {
        bail!("timestamp {at} precedes the series start {origin}");
    }
    let delta = saved.delta_minutes as i64;
    if minutes % delta != 0 {
        bail!("timestamp {at} is not on a {delta}-minute slot boundary");
    }
    let t = (minutes / delta) as usize;
    if t > series.len() {
        bail!(
            "timestamp {at} lies beyond the end of the stored series ({} slots); \
             forecasts need observed history up to the target step",
            series.len()
        );
    }

    let model = &saved.model;
    let (x1, x2) = build_inference_features(series, &saved.profiles, t, model.config.m)?;
    let probs = model.forward_parts(&x1, &x2, None)?;
    let preds = threshold_probs(&probs, model.config.threshold);

    println!("charger {}, forecast from {at} ({} steps):", saved.charger_id, model.config.k);
    println!("timestamp_slot_start,probability,prediction");
    for (j, (p, pred)) in probs.iter().zip(&preds).enumerate() {
        println!(
            "{},{:.6},{}",
            series.timestamp_of(t + j).format("%Y-%m-%dT%H:%M"),
            p,
            pred
        );
    }
    Ok(())
}
