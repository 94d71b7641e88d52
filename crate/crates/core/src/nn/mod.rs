//! From-scratch differentiable kernels.
//!
//! Everything here works in 64-bit floats and takes its randomness from an
//! explicit seeded generator, so a training run is a pure function of
//! (initial weights, data, seed).

pub mod adam;
pub mod dense;
pub mod dropout;
pub mod grad_check;
pub mod gru;
pub mod linalg;
pub mod loss;
pub mod lstm;
pub mod params;
pub mod train;

pub use adam::AdamState;
pub use dense::{Activation, DenseCache, DenseLayer};
pub use dropout::{dropout_apply, DropoutMask};
pub use grad_check::{finite_diff_grad, max_relative_error};
pub use gru::{gru_cell_forward, GruCellParams};
pub use linalg::Mat;
pub use loss::{bce_loss, bce_sigmoid_grad, PROB_CLAMP};
pub use lstm::{lstm_cell_forward, LstmCellParams};
pub use params::ParamSet;
pub use train::{train, GradModel, TrainHyperparams, TrainReport};
