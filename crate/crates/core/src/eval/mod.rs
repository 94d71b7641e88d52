//! Evaluation: window metrics, rolling multistep scoring over the test
//! split, repeated-run experiments, reports, and sensitivity sweeps.

pub mod experiment;
pub mod metrics;
pub mod report;
pub mod rolling;
pub mod sweep;

pub use experiment::{
    evaluate_method, fit_logistic, train_baseline, train_hybrid, train_hybrid_pooled, ChargerData,
    Method, MethodConfig,
};
pub use metrics::{f1_score, window_mae, window_score, WindowScore};
pub use report::{format_summary, write_report_csv};
pub use rolling::{rolling_evaluate, score_windows, HorizonReport, RunScore};
pub use sweep::{sensitivity_sweep, SweepParam, SweepRow};
