//! `train`: fit one hybrid model for a charger and horizon, write the
//! profile CSV and the model container.

use std::fs::File;

use anyhow::{bail, Context, Result};

use occuforge_core::eval::experiment::{run_seed, train_hybrid, train_hybrid_pooled};
use occuforge_core::eval::Method;
use occuforge_core::features::write_profiles_csv;
use occuforge_core::persist::{save_model, SavedModel};

use crate::commands::load_charger_data;
use crate::config::RunConfig;

pub fn run(cfg: &RunConfig, charger: &str, k: usize) -> Result<()> {
    if k == 0 {
        bail!("k must be at least 1");
    }
    std::fs::create_dir_all(&cfg.output_dir)?;
    let data = load_charger_data(cfg)?;
    let target = data
        .iter()
        .find(|d| d.charger_id == charger)
        .with_context(|| format!("charger '{charger}' not found in {}", cfg.occupancy_path().display()))?;

    let method_cfg = cfg.method_config();
    let seed = run_seed(cfg.seed, Method::Hybrid, k, 0, if cfg.pooled { None } else { Some(charger) });
    let model = if cfg.pooled {
        println!("training pooled over {} chargers (k = {k})", data.len());
        train_hybrid_pooled(&data, k, &method_cfg, seed)?
    } else {
        train_hybrid(target, k, &method_cfg, seed)?
    };

    let profiles_path = cfg.output_dir.join(format!("profiles_{charger}.csv"));
    write_profiles_csv(File::create(&profiles_path)?, &target.profiles)?;

    let model_path = cfg.output_dir.join(format!("hybrid_{charger}_k{k}.ofm"));
    save_model(
        &SavedModel {
            charger_id: charger.to_string(),
            delta_minutes: cfg.delta_minutes,
            model,
            profiles: target.profiles.clone(),
        },
        &model_path,
    )?;
    println!("trained hybrid for {charger} (k = {k}) on {} training slots", target.test_start);
    println!("profiles: {}", profiles_path.display());
    println!("model: {}", model_path.display());
    Ok(())
}
