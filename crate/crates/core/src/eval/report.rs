//! Report output: per-run CSV rows and a human-readable summary.

use std::collections::BTreeSet;
use std::io::Write;

use crate::error::Result;

use super::experiment::Method;
use super::rolling::HorizonReport;

/// CSV rows: method,charger_id,k,run,accuracy,f1 (run is 1-based).
pub fn write_report_csv<W: Write>(writer: W, reports: &[(Method, HorizonReport)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["method", "charger_id", "k", "run", "accuracy", "f1"])?;
    for (method, report) in reports {
        for (idx, run) in report.runs.iter().enumerate() {
            w.write_record([
                method.as_str().to_string(),
                report.charger_id.clone(),
                report.k.to_string(),
                (idx + 1).to_string(),
                format!("{:.6}", run.accuracy),
                format!("{:.6}", run.f1),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn mean_over_chargers(
    reports: &[(Method, HorizonReport)],
    method: Method,
    k: usize,
    pick_f1: bool,
) -> Option<f64> {
    let values: Vec<f64> = reports
        .iter()
        .filter(|(m, r)| *m == method && r.k == k)
        .map(|(_, r)| if pick_f1 { r.mean_f1 } else { r.mean_accuracy })
        .collect();
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Two aggregate tables (accuracy and F1, method x horizon averaged over
/// chargers) followed by a per-charger accuracy table per method.
pub fn format_summary(reports: &[(Method, HorizonReport)]) -> String {
    let mut methods: Vec<Method> = Vec::new();
    for (m, _) in reports {
        if !methods.contains(m) {
            methods.push(*m);
        }
    }
    let ks: BTreeSet<usize> = reports.iter().map(|(_, r)| r.k).collect();
    let chargers: BTreeSet<&str> = reports.iter().map(|(_, r)| r.charger_id.as_str()).collect();
    let runs = reports.first().map(|(_, r)| r.runs.len()).unwrap_or(0);

    let mut out = String::new();
    for (title, pick_f1) in [("Mean window accuracy", false), ("Mean window F1", true)] {
        out.push_str(&format!("{title} (average of {runs} runs)\n"));
        out.push_str(&format!("{:<10}", "method"));
        for k in &ks {
            out.push_str(&format!("{:>9}", format!("k={k}")));
        }
        out.push('\n');
        for method in &methods {
            out.push_str(&format!("{:<10}", method.as_str()));
            for k in &ks {
                match mean_over_chargers(reports, *method, *k, pick_f1) {
                    Some(v) => out.push_str(&format!("{v:>9.4}")),
                    None => out.push_str(&format!("{:>9}", "-")),
                }
            }
            out.push('\n');
        }
        out.push('\n');
    }

    if chargers.len() > 1 {
        for method in &methods {
            out.push_str(&format!("Per-charger accuracy ({})\n", method.as_str()));
            out.push_str(&format!("{:<12}", "charger"));
            for k in &ks {
                out.push_str(&format!("{:>9}", format!("k={k}")));
            }
            out.push('\n');
            for charger in &chargers {
                out.push_str(&format!("{charger:<12}"));
                for k in &ks {
                    let value = reports
                        .iter()
                        .find(|(m, r)| m == method && r.k == *k && r.charger_id == *charger)
                        .map(|(_, r)| r.mean_accuracy);
                    match value {
                        Some(v) => out.push_str(&format!("{v:>9.4}")),
                        None => out.push_str(&format!("{:>9}", "-")),
                    }
                }
                out.push('\n');
            }
            out.push('\n');
        }
    }
    out
}
