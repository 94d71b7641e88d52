//! `synth`: generate a synthetic occupancy series from a spec file.

use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use occuforge_core::ingest::write_occupancy_csv;
use occuforge_core::synth::synth_generate;

use crate::config::load_synth_spec;

pub fn run(spec_path: &Path, out_override: Option<&Path>) -> Result<()> {
    let (spec, spec_out) = load_synth_spec(spec_path)?;
    let series = synth_generate(&spec)?;

    let out = out_override
        .map(PathBuf::from)
        .or(spec_out)
        .unwrap_or_else(|| PathBuf::from("synth_occupancy.csv"));
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let file = File::create(&out).with_context(|| format!("cannot create {}", out.display()))?;
    write_occupancy_csv(file, &[&series])?;
    println!(
        "generated {} ({} days x {} slots, occupancy rate {:.3}) to {}",
        spec.charger_id,
        spec.days,
        series.slots_per_day(),
        series.occupancy_rate(),
        out.display()
    );
    Ok(())
}
