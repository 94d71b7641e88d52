//! Occupancy forecasting for EV rapid chargers.
//!
//! The crate turns raw charging-session logs into binary 10-minute occupancy
//! series and predicts multiple future steps per charger. The main predictor
//! is a hybrid network: an LSTM over the recent occupancy states combined
//! with a feedforward branch over time-of-day and day-type tendency features.
//! Plain LSTM/GRU networks and a walk-forward logistic regression are
//! available as benchmarks.
//!
//! Module map:
//! - [`ingest`]: session CSV parsing, outlier removal, discretization, split
//! - [`features`]: day-type profiles and sample assembly
//! - [`nn`]: dense/LSTM/GRU kernels, dropout, BCE loss, Adam, training loop
//! - [`models`]: the hybrid network, recurrent baselines, logistic baseline
//! - [`eval`]: window metrics, rolling evaluation, sensitivity sweeps
//! - [`synth`]: two-state Markov / scheduled synthetic series
//! - [`persist`]: model container files

pub mod error;
pub mod eval;
pub mod features;
pub mod ingest;
pub mod models;
pub mod nn;
pub mod persist;
pub mod seeds;
pub mod synth;

pub use error::{Error, Result};
pub use features::{DayTypeProfiles, Dataset, Sample};
pub use ingest::{ChargerClass, ChargingSession, OccupancySeries, SplitSeries};
pub use models::{HybridConfig, HybridModel, LogisticModel, RecurrentBaseline};
pub use nn::TrainHyperparams;
