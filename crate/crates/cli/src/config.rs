//! Plain-text key=value configuration files.
//!
//! Lines are `key = value`; blank lines and lines starting with `#` are
//! ignored. Every key has a default except the paths; unknown keys are hard
//! errors so a typo cannot silently fall back to a default.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;

use occuforge_core::eval::MethodConfig;
use occuforge_core::ingest::{ChargerClass, ColumnMap};
use occuforge_core::synth::{SlotSchedule, SynthSpec};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub sessions_csv: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub occupancy_csv: Option<PathBuf>,

    pub delta_minutes: u32,
    pub split_fraction: f64,
    pub start_date: Option<NaiveDate>,
    pub end_date: Option<NaiveDate>,
    pub charger_class: ChargerClass,
    pub columns: ColumnMap,

    pub m: usize,
    pub k_list: Vec<usize>,
    pub lstm_hidden: usize,
    pub branch: Vec<usize>,
    pub post_lstm: usize,
    pub merge: usize,
    pub threshold: f64,

    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub dropout: f64,
    pub seed: u64,
    pub runs: usize,
    pub pooled: bool,
    pub baseline_hidden: usize,
    pub baseline_dense: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sessions_csv: None,
            output_dir: PathBuf::from("out"),
            occupancy_csv: None,
            delta_minutes: 10,
            split_fraction: 0.7,
            start_date: None,
            end_date: None,
            charger_class: ChargerClass::Rapid,
            columns: ColumnMap::default(),
            m: 12,
            k_list: vec![1, 3, 6, 12, 24, 36],
            lstm_hidden: 36,
            branch: vec![64, 32, 16],
            post_lstm: 16,
            merge: 32,
            threshold: 0.5,
            learning_rate: 0.001,
            batch_size: 30,
            epochs: 15,
            dropout: 0.2,
            seed: 42,
            runs: 10,
            pooled: false,
            baseline_hidden: 36,
            baseline_dense: 32,
        }
    }
}

impl RunConfig {
    /// The occupancy CSV produced by `ingest` and consumed by the other
    /// commands.
    pub fn occupancy_path(&self) -> PathBuf {
        self.occupancy_csv.clone().unwrap_or_else(|| self.output_dir.join("occupancy.csv"))
    }

    pub fn method_config(&self) -> MethodConfig {
        let mut cfg = MethodConfig::default();
        cfg.hybrid.m = self.m;
        cfg.hybrid.lstm_hidden = self.lstm_hidden;
        cfg.hybrid.branch = self.branch.clone();
        cfg.hybrid.post_lstm = self.post_lstm;
        cfg.hybrid.merge = self.merge;
        cfg.hybrid.dropout_rate = self.dropout;
        cfg.hybrid.threshold = self.threshold;
        cfg.baseline_hidden = self.baseline_hidden;
        cfg.baseline_dense = self.baseline_dense;
        cfg.hp.learning_rate = self.learning_rate;
        cfg.hp.batch_size = self.batch_size;
        cfg.hp.epochs = self.epochs;
        cfg.hp.dropout_rate = self.dropout;
        cfg
    }
}

fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected 'key = value', got '{raw}'", idx + 1);
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn parse_usize_list(value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|v| v.trim().parse::<usize>().with_context(|| format!("bad integer '{v}'")))
        .collect()
}

fn parse_date(value: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(value, "%Y-%m-%d").with_context(|| format!("bad date '{value}' (want YYYY-MM-DD)"))
}

fn parse_bool(value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => bail!("bad boolean '{other}'"),
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let mut cfg = RunConfig::default();

    for (key, value) in parse_key_values(&text)? {
        let v = value.as_str();
        match key.as_str() {
            "sessions_csv" => cfg.sessions_csv = Some(PathBuf::from(v)),
            "output_dir" => cfg.output_dir = PathBuf::from(v),
            "occupancy_csv" => cfg.occupancy_csv = Some(PathBuf::from(v)),
            "delta_minutes" => cfg.delta_minutes = v.parse().context("delta_minutes")?,
            "split_fraction" => cfg.split_fraction = v.parse().context("split_fraction")?,
            "start_date" => cfg.start_date = Some(parse_date(v)?),
            "end_date" => cfg.end_date = Some(parse_date(v)?),
            "charger_class" => {
                cfg.charger_class = ChargerClass::parse(v)
                    .with_context(|| format!("unknown charger class '{v}'"))?
            }
            "col_charger_id" => cfg.columns.charger_id = v.to_string(),
            "col_plug_in" => cfg.columns.plug_in = v.to_string(),
            "col_plug_out" => cfg.columns.plug_out = v.to_string(),
            // An explicitly empty col_energy / col_class drops the optional
            // column from the mapping.
            "col_energy" => cfg.columns.energy = if v.is_empty() { None } else { Some(v.to_string()) },
            "col_class" => cfg.columns.class = if v.is_empty() { None } else { Some(v.to_string()) },
            "m" => cfg.m = v.parse().context("m")?,
            "k_list" => cfg.k_list = parse_usize_list(v)?,
            "lstm_hidden" => cfg.lstm_hidden = v.parse().context("lstm_hidden")?,
            "branch" => cfg.branch = parse_usize_list(v)?,
            "post_lstm" => cfg.post_lstm = v.parse().context("post_lstm")?,
            "merge" => cfg.merge = v.parse().context("merge")?,
            "threshold" => cfg.threshold = v.parse().context("threshold")?,
            "learning_rate" => cfg.learning_rate = v.parse().context("learning_rate")?,
            "batch_size" => cfg.batch_size = v.parse().context("batch_size")?,
            "epochs" => cfg.epochs = v.parse().context("epochs")?,
            "dropout" => cfg.dropout = v.parse().context("dropout")?,
            "seed" => cfg.seed = v.parse().context("seed")?,
            "runs" => cfg.runs = v.parse().context("runs")?,
            "pooled" => cfg.pooled = parse_bool(v)?,
            "baseline_hidden" => cfg.baseline_hidden = v.parse().context("baseline_hidden")?,
            "baseline_dense" => cfg.baseline_dense = v.parse().context("baseline_dense")?,
            other => bail!("unknown config key '{other}'"),
        }
    }

    if cfg.k_list.is_empty() {
        bail!("k_list must not be empty");
    }
    if cfg.k_list.contains(&0) {
        bail!("every k must be at least 1");
    }
    if !(cfg.split_fraction > 0.0 && cfg.split_fraction < 1.0) {
        bail!("split_fraction must be in (0, 1)");
    }
    for (name, path) in
        [("sessions_csv", &cfg.sessions_csv), ("occupancy_csv", &cfg.occupancy_csv)]
    {
        if let Some(p) = path {
            if !p.exists() {
                bail!("{name} path does not exist: {}", p.display());
            }
        }
    }
    Ok(cfg)
}

/// Synthetic-series spec file (same key=value syntax).
pub fn load_synth_spec(path: &Path) -> Result<(SynthSpec, Option<PathBuf>)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read synth spec {}", path.display()))?;
    let mut spec = SynthSpec::default();
    let mut out = None;
    let mut schedule = SlotSchedule::default();
    let mut has_schedule = false;

    let parse_ranges = |value: &str| -> Result<Vec<(usize, usize)>> {
        value
            .split(',')
            .map(|part| {
                let part = part.trim();
                let (lo, hi) = part
                    .split_once('-')
                    .with_context(|| format!("bad slot range '{part}' (want lo-hi)"))?;
                Ok((lo.trim().parse::<usize>()?, hi.trim().parse::<usize>()?))
            })
            .collect()
    };

    for (key, value) in parse_key_values(&text)? {
        let v = value.as_str();
        match key.as_str() {
            "charger_id" => spec.charger_id = v.to_string(),
            "start_date" => spec.start_date = parse_date(v)?,
            "days" => spec.days = v.parse().context("days")?,
            "delta_minutes" => spec.delta_minutes = v.parse().context("delta_minutes")?,
            "seed" => spec.seed = v.parse().context("seed")?,
            "initial_state" => spec.initial_state = v.parse().context("initial_state")?,
            "weekday_p01" => spec.weekday.p01 = v.parse().context("weekday_p01")?,
            "weekday_p10" => spec.weekday.p10 = v.parse().context("weekday_p10")?,
            "weekend_p01" => spec.weekend.p01 = v.parse().context("weekend_p01")?,
            "weekend_p10" => spec.weekend.p10 = v.parse().context("weekend_p10")?,
            "schedule_weekday" => {
                has_schedule = true;
                schedule.weekday = parse_ranges(v)?;
            }
            "schedule_weekend" => {
                has_schedule = true;
                schedule.weekend = parse_ranges(v)?;
            }
            "out" => out = Some(PathBuf::from(v)),
            other => bail!("unknown synth spec key '{other}'"),
        }
    }
    if has_schedule {
        spec.schedule = Some(schedule);
    }
    Ok((spec, out))
}
