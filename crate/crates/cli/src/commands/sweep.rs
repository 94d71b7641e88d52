//! `sweep`: vary one hyperparameter over a grid and report mean accuracy
//! per value.

use std::fs::File;
use std::io::Write;

use anyhow::{bail, Context, Result};

use occuforge_core::eval::{sensitivity_sweep, SweepParam};

use crate::commands::load_charger_data;
use crate::config::RunConfig;

#[allow(clippy::too_many_arguments)]
pub fn run(
    cfg: &RunConfig,
    param: SweepParam,
    grid: &[f64],
    k: usize,
    runs: usize,
    charger: Option<&str>,
) -> Result<()> {
    if grid.is_empty() {
        bail!("sweep grid is empty");
    }
    std::fs::create_dir_all(&cfg.output_dir)?;
    let mut data = load_charger_data(cfg)?;
    if let Some(id) = charger {
        data.retain(|d| d.charger_id == id);
        if data.is_empty() {
            bail!("charger '{id}' not found in {}", cfg.occupancy_path().display());
        }
    }

    println!(
        "sweeping {} over {:?} (k = {k}, {} chargers x {runs} runs)",
        param.as_str(),
        grid,
        data.len()
    );
    let rows = sensitivity_sweep(&data, k, &cfg.method_config(), param, grid, runs, cfg.seed, cfg.pooled)?;

    let path = cfg.output_dir.join(format!("sweep_{}.csv", param.as_str()));
    let mut file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    writeln!(file, "{},mean_accuracy", param.as_str())?;
    println!("{:<14}mean_accuracy", param.as_str());
    for row in &rows {
        writeln!(file, "{},{:.6}", row.value, row.mean_accuracy)?;
        println!("{:<14}{:.4}", row.value, row.mean_accuracy);
    }
    println!("sweep table: {}", path.display());
    Ok(())
}
