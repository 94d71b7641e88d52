//! `ingest`: sessions CSV -> rejected-row report, outlier removal, and
//! per-charger occupancy series.

use std::collections::BTreeSet;
use std::fs::File;
use std::path::Path;

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;

use occuforge_core::ingest::{
    discretize, parse_sessions, remove_outliers, write_occupancy_csv, ChargingSession,
    OccupancySeries,
};

use crate::config::RunConfig;

/// Inclusive day range covering every session; config dates override.
fn date_range(sessions: &[ChargingSession], cfg: &RunConfig) -> Result<(NaiveDate, usize)> {
    let start = match cfg.start_date {
        Some(d) => d,
        None => sessions.iter().map(|s| s.plug_in.date()).min().context("no sessions")?,
    };
    let end = match cfg.end_date {
        Some(d) => d,
        None => {
            // A plug_out exactly at midnight belongs to the previous day.
            sessions
                .iter()
                .map(|s| {
                    let out = s.plug_out;
                    if out.time() == chrono::NaiveTime::MIN {
                        out.date().pred_opt().unwrap()
                    } else {
                        out.date()
                    }
                })
                .max()
                .context("no sessions")?
        }
    };
    if end < start {
        bail!("end date {end} precedes start date {start}");
    }
    Ok((start, (end - start).num_days() as usize + 1))
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    let sessions_path = cfg
        .sessions_csv
        .as_ref()
        .context("config must set sessions_csv for the ingest command")?;
    std::fs::create_dir_all(&cfg.output_dir)?;

    let file = File::open(sessions_path)
        .with_context(|| format!("cannot open {}", sessions_path.display()))?;
    let outcome = parse_sessions(file, &cfg.columns)?;

    let rejects_path = cfg.output_dir.join("rejects.txt");
    std::fs::write(&rejects_path, outcome.reject_report())?;
    println!(
        "parsed {} sessions, rejected {} rows (see {})",
        outcome.sessions.len(),
        outcome.rejects.len(),
        rejects_path.display()
    );

    let class_sessions: Vec<ChargingSession> = outcome
        .sessions
        .into_iter()
        .filter(|s| s.charger_class == cfg.charger_class)
        .collect();
    if class_sessions.is_empty() {
        bail!("no {} sessions found", cfg.charger_class.as_str());
    }
    println!("{} {} sessions retained", class_sessions.len(), cfg.charger_class.as_str());

    let split = remove_outliers(class_sessions)?;
    println!(
        "outliers removed: {} of {} ({:.2}%); duration median {:.1} min, sd {:.1} min, threshold {:.1} min",
        split.removed.len(),
        split.kept.len() + split.removed.len(),
        100.0 * split.removed_fraction(),
        split.median_minutes,
        split.sd_minutes,
        split.threshold_minutes
    );

    let (start, days) = date_range(&split.kept, cfg)?;
    let chargers: BTreeSet<String> = split.kept.iter().map(|s| s.charger_id.clone()).collect();
    let mut series_list: Vec<OccupancySeries> = Vec::with_capacity(chargers.len());
    for charger in &chargers {
        series_list.push(discretize(&split.kept, charger, start, days, cfg.delta_minutes)?);
    }

    let occupancy_path = cfg.occupancy_path();
    write_series(&occupancy_path, &series_list)?;
    println!(
        "wrote {} chargers x {} days ({} slots each) to {}",
        series_list.len(),
        days,
        series_list.first().map(|s| s.len()).unwrap_or(0),
        occupancy_path.display()
    );
    Ok(())
}

fn write_series(path: &Path, series_list: &[OccupancySeries]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let refs: Vec<&OccupancySeries> = series_list.iter().collect();
    write_occupancy_csv(file, &refs)?;
    Ok(())
}
