//! `evaluate`: repeated train+score cycles per method, charger, and horizon;
//! emits the report CSV and a summary table.

use std::fs::File;

use anyhow::{bail, Result};

use occuforge_core::eval::{evaluate_method, format_summary, write_report_csv, Method};

use crate::commands::load_charger_data;
use crate::config::RunConfig;

pub fn run(cfg: &RunConfig, k_list: &[usize], runs: usize, methods: &[Method]) -> Result<()> {
    if runs == 0 {
        bail!("runs must be at least 1");
    }
    if methods.is_empty() {
        bail!("at least one method is required");
    }
    std::fs::create_dir_all(&cfg.output_dir)?;
    let data = load_charger_data(cfg)?;
    let method_cfg = cfg.method_config();

    let mut reports = Vec::new();
    for &method in methods {
        for &k in k_list {
            println!(
                "evaluating {} at k = {k} ({} chargers x {runs} runs{})",
                method.as_str(),
                data.len(),
                if cfg.pooled { ", pooled" } else { "" }
            );
            let horizon_reports =
                evaluate_method(&data, method, k, runs, cfg.seed, &method_cfg, cfg.pooled)?;
            reports.extend(horizon_reports.into_iter().map(|r| (method, r)));
        }
    }

    let report_path = cfg.output_dir.join("report.csv");
    write_report_csv(File::create(&report_path)?, &reports)?;
    let summary = format_summary(&reports);
    let summary_path = cfg.output_dir.join("summary.txt");
    std::fs::write(&summary_path, &summary)?;

    print!("{summary}");
    println!("report: {}", report_path.display());
    println!("summary: {}", summary_path.display());
    Ok(())
}
