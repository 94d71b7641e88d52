//! `occuforge`: charging-station occupancy forecasting pipeline.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use occuforge_core::eval::{Method, SweepParam};

#[derive(Parser, Debug)]
#[command(name = "occuforge", version, about = "Charger occupancy forecasting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct ConfigArg {
    /// Path to the key=value run configuration.
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse session CSV, drop outliers, and write occupancy series.
    Ingest {
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Train one hybrid model for a charger and horizon.
    Train {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        charger: String,
        #[arg(long)]
        k: usize,
    },
    /// Repeated train+score cycles; writes report CSV and summary.
    Evaluate {
        #[command(flatten)]
        config: ConfigArg,
        /// Horizons, e.g. 1,3,6,12,24,36 (default from config).
        #[arg(long, value_delimiter = ',')]
        k_list: Option<Vec<usize>>,
        /// Training repetitions per cell (default from config).
        #[arg(long)]
        runs: Option<usize>,
        /// Methods: hybrid, lstm, gru, logistic.
        #[arg(long, value_delimiter = ',', default_value = "hybrid")]
        methods: Vec<String>,
    },
    /// Forecast k steps for a charger from a saved model.
    Predict {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        model: PathBuf,
        /// Forecast start, e.g. 2018-05-20T10:00.
        #[arg(long)]
        at: String,
    },
    /// Sensitivity sweep over one hyperparameter.
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        /// learning_rate, lstm_hidden, dropout, epochs, batch_size, branch_layers.
        #[arg(long)]
        param: String,
        /// Comma-separated grid values.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
        /// Horizon (default: first k in the config's k_list).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        runs: Option<usize>,
        /// Restrict to one charger.
        #[arg(long)]
        charger: Option<String>,
    },
    /// Generate a synthetic occupancy series.
    Synth {
        /// Path to the synth spec file.
        #[arg(long)]
        spec: PathBuf,
        /// Output CSV (overrides the spec's `out` key).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { config } => {
            let cfg = config::load_config(&config.config)?;
            commands::ingest::run(&cfg)
        }
        Command::Train { config, charger, k } => {
            let cfg = config::load_config(&config.config)?;
            commands::train::run(&cfg, &charger, k)
        }
        Command::Evaluate { config, k_list, runs, methods } => {
            let cfg = config::load_config(&config.config)?;
            let k_list = k_list.unwrap_or_else(|| cfg.k_list.clone());
            let runs = runs.unwrap_or(cfg.runs);
            let methods = methods
                .iter()
                .map(|m| Method::parse(m).with_context(|| format!("unknown method '{m}'")))
                .collect::<Result<Vec<_>>>()?;
            commands::evaluate::run(&cfg, &k_list, runs, &methods)
        }
        Command::Predict { config, model, at } => {
            let cfg = config::load_config(&config.config)?;
            commands::predict::run(&cfg, &model, &at)
        }
        Command::Sweep { config, param, grid, k, runs, charger } => {
            let cfg = config::load_config(&config.config)?;
            let param: SweepParam = param.parse()?;
            let k = k.unwrap_or(cfg.k_list[0]);
            let runs = runs.unwrap_or(cfg.runs);
            commands::sweep::run(&cfg, param, &grid, k, runs, charger.as_deref())
        }
        Command::Synth { spec, out } => commands::synth::run(&spec, out.as_deref()),
    }
}
